#pragma once

#include "tgen/cfg_generation.hpp"
#include "tgen/dataset.hpp"
#include "tgen/eval.hpp"
#include "tgen/llm.hpp"
#include "tgen/model.hpp"
#include "tgen/paths.hpp"
#include "tgen/pipeline.hpp"
#include "tgen/testcase.hpp"
#include "tgen/validation.hpp"
