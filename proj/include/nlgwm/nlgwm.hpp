#pragma once

#include "nlgwm/augment.hpp"
#include "nlgwm/corpus.hpp"
#include "nlgwm/detect.hpp"
#include "nlgwm/error.hpp"
#include "nlgwm/lm.hpp"
#include "nlgwm/mark.hpp"
#include "nlgwm/oracle.hpp"
#include "nlgwm/patterns.hpp"
#include "nlgwm/rng.hpp"
#include "nlgwm/tagger.hpp"
#include "nlgwm/upos.hpp"
#include "nlgwm/verify.hpp"
#include "nlgwm/watermark.hpp"
#include "nlgwm/wmgen.hpp"
