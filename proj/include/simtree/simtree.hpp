#pragma once

#include "simtree/common.hpp"
#include "simtree/dataset.hpp"
#include "simtree/eval.hpp"
#include "simtree/experiment.hpp"
#include "simtree/forest.hpp"
#include "simtree/leafrank.hpp"
#include "simtree/model_io.hpp"
#include "simtree/pairs.hpp"
#include "simtree/svg.hpp"
#include "simtree/synth.hpp"
#include "simtree/transform.hpp"
#include "simtree/treerank.hpp"
