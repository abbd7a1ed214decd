#ifndef COLLGRAM_COLLGRAM_HPP
#define COLLGRAM_COLLGRAM_HPP

#include "collgram/association.hpp"
#include "collgram/corpus_index.hpp"
#include "collgram/error.hpp"
#include "collgram/profiler.hpp"
#include "collgram/report.hpp"
#include "collgram/stats.hpp"
#include "collgram/token.hpp"

#endif  // COLLGRAM_COLLGRAM_HPP
