#pragma once

#include "mispron/alignment.hpp"
#include "mispron/annotation.hpp"
#include "mispron/clarity.hpp"
#include "mispron/classifier.hpp"
#include "mispron/error.hpp"
#include "mispron/lexicon.hpp"
#include "mispron/localizer.hpp"
#include "mispron/stats.hpp"
#include "mispron/taxonomy.hpp"
#include "mispron/text.hpp"
