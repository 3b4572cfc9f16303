#pragma once

// Umbrella header for the analysis core (no HTTP or CLI dependencies).

#include "egoflux/collections.hpp"
#include "egoflux/corpus.hpp"
#include "egoflux/egonet.hpp"
#include "egoflux/error.hpp"
#include "egoflux/influence.hpp"
#include "egoflux/pipeline.hpp"
#include "egoflux/scene.hpp"
#include "egoflux/score_cache.hpp"
#include "egoflux/visspec_json.hpp"
#include "egoflux/workspace.hpp"
