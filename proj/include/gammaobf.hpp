//
// Copyright 2026 The gammaobf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef GAMMAOBF_GAMMAOBF_HPP_
#define GAMMAOBF_GAMMAOBF_HPP_

#include "gammaobf/confidentiality.hpp"
#include "gammaobf/deconvolution.hpp"
#include "gammaobf/errors.hpp"
#include "gammaobf/evaluation.hpp"
#include "gammaobf/noise_model.hpp"
#include "gammaobf/numerics.hpp"
#include "gammaobf/optimizer.hpp"
#include "gammaobf/rng.hpp"

#endif  // GAMMAOBF_GAMMAOBF_HPP_
