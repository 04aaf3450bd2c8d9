// Copyright 2026 The MSTM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MSTM_MSTM_HPP_
#define MSTM_MSTM_HPP_

#include "mstm/baselines.hpp"
#include "mstm/dataset.hpp"
#include "mstm/error.hpp"
#include "mstm/eval.hpp"
#include "mstm/index.hpp"
#include "mstm/io.hpp"
#include "mstm/search.hpp"
#include "mstm/similarity.hpp"
#include "mstm/synthetic.hpp"
#include "mstm/types.hpp"
#include "mstm/weights_learn.hpp"

#endif  // MSTM_MSTM_HPP_
