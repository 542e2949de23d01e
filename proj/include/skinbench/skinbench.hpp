#pragma once

#include "skinbench/colorspaces.hpp"
#include "skinbench/dataset.hpp"
#include "skinbench/detectors.hpp"
#include "skinbench/ensemble.hpp"
#include "skinbench/errors.hpp"
#include "skinbench/evaluation.hpp"
#include "skinbench/gmm.hpp"
#include "skinbench/histogram.hpp"
#include "skinbench/image.hpp"
#include "skinbench/model_io.hpp"
#include "skinbench/rule_detectors.hpp"
#include "skinbench/spatial.hpp"
