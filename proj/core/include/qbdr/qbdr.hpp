#pragma once

#include "qbdr/bench.hpp"
#include "qbdr/laplace_inversion.hpp"
#include "qbdr/linalg.hpp"
#include "qbdr/mapph.hpp"
#include "qbdr/matrix_equations.hpp"
#include "qbdr/model_io.hpp"
#include "qbdr/oracle.hpp"
#include "qbdr/passage_deviation.hpp"
#include "qbdr/perturbation.hpp"
#include "qbdr/qbd_model.hpp"
#include "qbdr/stationary.hpp"
#include "qbdr/transform_reward.hpp"
#include "qbdr/types.hpp"
