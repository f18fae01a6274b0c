//! Shared inputs for the criterion benches.

use tumorseg::fixtures::{generate, random_tumor_spec};
use tumorseg::{LabelVolume, PostprocRules, ProbVolume};

/// Grid of a BraTS case.
pub const BRATS_DIMS: [usize; 3] = [240, 240, 155];

/// A synthetic case: tuned-pipeline prediction, ground truth, and the probabilities behind the prediction.
pub struct Case {
    pub pred: LabelVolume,
    pub gt: LabelVolume,
    pub probs: ProbVolume,
}

pub fn case(dims: [usize; 3], seed: u64) -> Case {
    let spec = random_tumor_spec(dims, seed);
    let (gt, probs) = generate(&spec).expect("random spec fits its grid");
    let mut shifted = spec.clone();
    for p in &mut shifted.primitives {
        p.center[1] += 1.0;
    }
    let (_, shifted_probs) = generate(&shifted).unwrap_or_else(|_| (gt.clone(), probs.clone()));
    let pred = tumorseg::run_pipeline(&[shifted_probs], &PostprocRules::default()).expect("valid rules");
    Case { pred, gt, probs }
}
