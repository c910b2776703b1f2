#pragma once

/// Convenience umbrella for the whole library except the live HTTP client
/// (include dialectic/http_backend.hpp separately — it pulls in the network
/// stack and OpenSSL headers).

#include "dialectic/backend.hpp"
#include "dialectic/digest.hpp"
#include "dialectic/engine.hpp"
#include "dialectic/json_io.hpp"
#include "dialectic/mamv.hpp"
#include "dialectic/prompts.hpp"
#include "dialectic/rng.hpp"
#include "dialectic/schedule.hpp"
#include "dialectic/sink.hpp"
#include "dialectic/store.hpp"
#include "dialectic/sweep.hpp"
#include "dialectic/types.hpp"
