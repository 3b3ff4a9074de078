// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "hetgdt/augment/text.hpp"

namespace hetgdt::testing {

// Case-study users and tweets.
inline const augment::UserText kCaseOriginal = augment::UserText::make(
    "yas***exb", "@dru***cy",
    "Online dispensary, premium lab-tested psychedelic products, must be 18+, same day shipping in "
    "***. DM me for menu. #LSD #420 #Meth #acid.");
inline const augment::UserText kEdgeCaseOriginal = augment::UserText::make(
    "yas***exb", "@dru***cy",
    "Online dispensary, premium lab-tested psychedelic products, must be 18+, same day shipping in "
    "***. DM me for menu. #LSD #420 #acid.");
inline const augment::UserText kEdgeCaseSynthetic = augment::UserText::make(
    "Psy***ete", "@ss***ete",
    "Your one-stop shop for lab-tested psychedelic products. Get ready to trip with the selection of "
    "premium psychedelic products. #lsdtrip #psychedelics #acid #weed #420 #mushrooms.");
inline const std::vector<std::string> kCaseTweets = {
    "Vibe for everyday. How was your day?",
    "DM me for menu. #Meth#LSD#420#AcidTrip.",
    "Same day shipping in ***.",
    "!!!Giveaway!!! I will be giving away ONE 12.30OZ BAG OF METH. To enter, - Follow me, Retweet, and "
    "Reply 'Meth' under this post. END AUG ***.",
};

}  // namespace hetgdt::testing
