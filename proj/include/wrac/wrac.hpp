#pragma once

#include "wrac/baselines.hpp"
#include "wrac/chunk.hpp"
#include "wrac/corpus.hpp"
#include "wrac/document.hpp"
#include "wrac/errors.hpp"
#include "wrac/html.hpp"
#include "wrac/index.hpp"
#include "wrac/judge.hpp"
#include "wrac/ledger.hpp"
#include "wrac/llm_client.hpp"
#include "wrac/markdown.hpp"
#include "wrac/metrics.hpp"
#include "wrac/parse.hpp"
#include "wrac/pipeline.hpp"
#include "wrac/planner.hpp"
#include "wrac/prompts.hpp"
#include "wrac/report.hpp"
#include "wrac/resolver.hpp"
#include "wrac/tokens.hpp"
