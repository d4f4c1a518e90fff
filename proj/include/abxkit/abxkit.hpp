// abxkit/abxkit.hpp

// Copyright 2026 The abxkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#define ABXKIT_VERSION "0.1.0"

#include "abxkit/abx.hpp"
#include "abxkit/corpus.hpp"
#include "abxkit/error.hpp"
#include "abxkit/feature_io.hpp"
#include "abxkit/linking.hpp"
#include "abxkit/lists.hpp"
#include "abxkit/metrics.hpp"
#include "abxkit/mfcc.hpp"
#include "abxkit/normal.hpp"
#include "abxkit/parallel.hpp"
#include "abxkit/probit.hpp"
#include "abxkit/random.hpp"
#include "abxkit/responses.hpp"
#include "abxkit/text.hpp"
#include "abxkit/trial.hpp"
#include "abxkit/wav.hpp"
