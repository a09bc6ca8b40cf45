//! Character-level LSTM encoder-decoder corrector.

pub mod gradcheck;
pub mod hook;
pub mod io;
pub mod lstm;
pub mod model;
pub mod tensor;
pub mod train;
pub mod vocab;

pub use gradcheck::{gradient_check, GradCheck};
pub use hook::{ExternalLayers, InitHook, LayerStack};
pub use lstm::LstmCell;
pub use model::{Direction, EncoderState, ModelConfig, Params, Seq2SeqModel};
pub use train::{build_model, train, Adam, TrainConfig, TrainPair, TrainReport};
pub use vocab::CharVocab;
