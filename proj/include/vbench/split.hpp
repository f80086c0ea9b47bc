#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "vbench/rng.hpp"

namespace vbench {

struct SplitSpec {
    double train_fraction = 0.8;      // canonical ratios: .80 .50 .20 .05 .01
    double validation_holdout = 0.2;  // fraction of the training block
    std::uint64_t shuffle_seed = 0;

    void validate() const {
        if (!(train_fraction > 0.0 && train_fraction < 1.0))
            throw std::invalid_argument("SplitSpec: train_fraction must be in (0,1)");
        if (validation_holdout < 0.0 || validation_holdout >= 1.0)
            throw std::invalid_argument("SplitSpec: validation_holdout must be in [0,1)");
    }
};

struct SplitResult {
    std::vector<int> train;
    std::vector<int> validation;
    std::vector<int> test;
};

// Stratified split. Per class: floor(train_fraction * class_size) samples
// train (remainder tests), and validation_holdout of the training block is
// carved off for validation — except a 2-sample training block, which goes
// 1 train / 1 validation. Membership is a pure function of (labels, spec);
// each class draws from its own stream of the shuffle seed.
inline SplitResult make_split(const std::vector<int>& labels, const SplitSpec& spec) {
    spec.validate();
    std::map<int, std::vector<int>> per_class;
    for (int i = 0; i < static_cast<int>(labels.size()); ++i)
        per_class[labels[i]].push_back(i);

    SplitResult out;
    for (auto& [cls, idx] : per_class) {
        if (idx.size() < 2)
            throw std::invalid_argument("make_split: class with fewer than 2 samples");
        CounterRng rng(spec.shuffle_seed, hash_combine(0x5917ULL, static_cast<std::uint64_t>(cls)));
        seeded_shuffle(idx, rng);

        const int n = static_cast<int>(idx.size());
        const int train_total = static_cast<int>(std::floor(spec.train_fraction * n));
        if (train_total < 1)
            throw std::invalid_argument("make_split: train fraction floors to zero for a class");
        int val_count = train_total == 2
                            ? 1
                            : static_cast<int>(std::floor(spec.validation_holdout * train_total));

        for (int i = 0; i < train_total - val_count; ++i) out.train.push_back(idx[i]);
        for (int i = train_total - val_count; i < train_total; ++i) out.validation.push_back(idx[i]);
        for (int i = train_total; i < n; ++i) out.test.push_back(idx[i]);
    }
    return out;
}

} // namespace vbench
