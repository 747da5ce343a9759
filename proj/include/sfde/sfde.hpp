#pragma once

#include "sfde/error.hpp"
#include "sfde/spectral.hpp"
#include "sfde/fbm.hpp"
#include "sfde/cq.hpp"
#include "sfde/mlf.hpp"
#include "sfde/solver.hpp"
#include "sfde/experiments.hpp"
#include "sfde/validation.hpp"
