//! The four-layer classifier: embedding, mixture, measurement, dense head.

mod forward;
mod params;
mod variant;

pub use forward::{
    classify, embed_word, forward, measure_sentence, sentence_rho, softmax, term_weights,
    ForwardCache,
};
pub use params::{renormalize, ParamBlock, ParamSet, PARAM_BLOCKS};
pub use variant::VariantTag;
