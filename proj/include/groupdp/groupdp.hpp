// Copyright 2026 The GroupDP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GROUPDP_GROUPDP_HPP_
#define GROUPDP_GROUPDP_HPP_

#include "groupdp/accountant.hpp"
#include "groupdp/baselines.hpp"
#include "groupdp/composition.hpp"
#include "groupdp/frontend.hpp"
#include "groupdp/oracle.hpp"
#include "groupdp/pld.hpp"
#include "groupdp/sensitivity.hpp"

#endif  // GROUPDP_GROUPDP_HPP_
