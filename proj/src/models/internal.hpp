#pragma once

#include <memory>

#include "qts/models/forecaster.hpp"

namespace qts::models::detail {

std::unique_ptr<Forecaster> make_linear(ModelConfig cfg);
std::unique_ptr<Forecaster> make_indep_vqc(ModelConfig cfg);
std::unique_ptr<Forecaster> make_vqc_mlp(ModelConfig cfg);
std::unique_ptr<Forecaster> make_dense_embed(ModelConfig cfg);
std::unique_ptr<Forecaster> make_enc_vqc_dec(ModelConfig cfg);
std::unique_ptr<Forecaster> make_reupload(ModelConfig cfg);
std::unique_ptr<Forecaster> make_itransformer(ModelConfig cfg);
std::unique_ptr<Forecaster> make_iqtransformer(ModelConfig cfg);

}  // namespace qts::models::detail
