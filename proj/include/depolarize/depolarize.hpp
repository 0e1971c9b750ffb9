#pragma once

#include "depolarize/dynamics.hpp"
#include "depolarize/error.hpp"
#include "depolarize/experiment.hpp"
#include "depolarize/generators.hpp"
#include "depolarize/graph.hpp"
#include "depolarize/io.hpp"
#include "depolarize/isoperimetric.hpp"
#include "depolarize/laplacian_eigen.hpp"
#include "depolarize/perturbation.hpp"
#include "depolarize/planner.hpp"
#include "depolarize/rng.hpp"
#include "depolarize/spectral.hpp"
