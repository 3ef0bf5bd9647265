#pragma once

#include "catalog.hpp"
#include "fractal.hpp"
#include "level_graph.hpp"
#include "metric_engine.hpp"
#include "path_algebra.hpp"
#include "rational.hpp"
#include "up_checker.hpp"
#include "word.hpp"
