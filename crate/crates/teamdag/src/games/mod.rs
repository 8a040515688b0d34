//! Benchmark game generators.

mod betting;
mod chain;
mod dice;
mod goofspiel;
mod kuhn;
mod leduc;

pub use chain::build_chain_game;
pub use dice::{build_liars_dice, build_liars_dice_variant};
pub use goofspiel::build_goofspiel;
pub use kuhn::build_kuhn;
pub use leduc::build_leduc;
