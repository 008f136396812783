#pragma once

#include "caselasso/cv.hpp"
#include "caselasso/dataset.hpp"
#include "caselasso/error.hpp"
#include "caselasso/gram.hpp"
#include "caselasso/influence.hpp"
#include "caselasso/lambda_path.hpp"
#include "caselasso/lasso.hpp"
#include "caselasso/oracle.hpp"
#include "caselasso/parallel.hpp"
#include "caselasso/simulate.hpp"
#include "caselasso/types.hpp"
#include "caselasso/weight_path.hpp"
