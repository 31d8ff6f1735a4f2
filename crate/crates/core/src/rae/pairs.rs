use rand::Rng;

use crate::data::{Category, Window};
use crate::{seed, Error, Result};

/// Training input and its target.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplacementPair {
    pub input: Window,
    pub target: Window,
    /// Category of the input window.
    pub source: Category,
}

/// White and gray windows map to themselves; each black window maps to a gray
/// window drawn uniformly with replacement. Pairs are fixed once built.
pub fn build_replacement_pairs(
    white: &[Window],
    black: &[Window],
    gray: &[Window],
    seed: u64,
) -> Result<Vec<ReplacementPair>> {
    if !black.is_empty() && gray.is_empty() {
        return Err(Error::config(
            "black-listed windows need at least one gray-listed window to replace them",
        ));
    }
    let identity = |w: &Window, source| ReplacementPair {
        input: w.clone(),
        target: w.clone(),
        source,
    };
    let mut pairs = Vec::with_capacity(white.len() + gray.len() + black.len());
    pairs.extend(white.iter().map(|w| identity(w, Category::White)));
    pairs.extend(gray.iter().map(|w| identity(w, Category::Gray)));
    let mut rng = seed::rng(seed);
    for b in black {
        let g = &gray[rng.random_range(0..gray.len())];
        if g.shape() != b.shape() {
            return Err(Error::shape("black and gray windows differ in shape"));
        }
        pairs.push(ReplacementPair {
            input: b.clone(),
            target: g.clone(),
            source: Category::Black,
        });
    }
    Ok(pairs)
}
