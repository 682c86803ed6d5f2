#pragma once

#include "weylforge/jet.hpp"
#include "weylforge/tensor.hpp"
#include "weylforge/curvature_algebra.hpp"
#include "weylforge/chart.hpp"
#include "weylforge/geometry.hpp"
#include "weylforge/derdzinski.hpp"
#include "weylforge/identities.hpp"
#include "weylforge/suite.hpp"
