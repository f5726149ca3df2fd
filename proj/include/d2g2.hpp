/*
 * Copyright 2026 The d2g2 Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "d2g2/graph.hpp"
#include "d2g2/rng.hpp"
#include "d2g2/dataset_io.hpp"
#include "d2g2/synth.hpp"
#include "d2g2/autodiff.hpp"
#include "d2g2/nn.hpp"
#include "d2g2/generative.hpp"
#include "d2g2/inference.hpp"
#include "d2g2/model.hpp"
#include "d2g2/elbo.hpp"
#include "d2g2/train.hpp"
#include "d2g2/metrics.hpp"
#include "d2g2/probe.hpp"
#include "d2g2/plot.hpp"
