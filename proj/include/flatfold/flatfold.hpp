#pragma once

#include "flatfold/rational.hpp"
#include "flatfold/graph.hpp"
#include "flatfold/io.hpp"
#include "flatfold/geometry.hpp"
#include "flatfold/face_constraints.hpp"
#include "flatfold/csp.hpp"
#include "flatfold/flow.hpp"
#include "flatfold/verdict.hpp"
#include "flatfold/oracle.hpp"
#include "flatfold/decider.hpp"
#include "flatfold/generate.hpp"
#include "flatfold/diagram.hpp"
