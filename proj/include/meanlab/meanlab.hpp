#pragma once

#include "meanlab/error.hpp"
#include "meanlab/jet.hpp"
#include "meanlab/expr.hpp"
#include "meanlab/function_pair.hpp"
#include "meanlab/quadrature.hpp"
#include "meanlab/measure.hpp"
#include "meanlab/roots.hpp"
#include "meanlab/means.hpp"
#include "meanlab/calculus.hpp"
#include "meanlab/equality.hpp"
#include "meanlab/report.hpp"
