//! List-based soft output in the style of Pyndiah's approach.

use crate::analysis::OpCounts;
use crate::channel::LLR_MAX;

/// ℓ[j] = PM(best with c_j = 1) − PM(best with c_j = 0) when both sides
/// appear in the list, else ±`saturation` towards the side present.
///
/// The default saturation is the largest two-sided margin in the list,
/// capped at [`LLR_MAX`].
pub fn pyndiah_baseline(list: &[(&[u8], f64)], ch_llrs: &[f64], saturation: Option<f64>) -> Vec<f64> {
    pyndiah_counted(list, ch_llrs, saturation, &mut OpCounts::default())
}

pub fn pyndiah_counted(list: &[(&[u8], f64)], ch_llrs: &[f64], saturation: Option<f64>, ops: &mut OpCounts) -> Vec<f64> {
    let n = ch_llrs.len();
    let mut best = vec![[f64::INFINITY; 2]; n];
    for &(cw, pm) in list {
        for (j, b) in best.iter_mut().enumerate() {
            let side = &mut b[(cw[j] & 1) as usize];
            ops.compare += 1;
            if pm < *side {
                *side = pm;
            }
        }
    }
    let margins: Vec<Option<f64>> = best
        .iter()
        .map(|&[p0, p1]| {
            if p0.is_finite() && p1.is_finite() {
                ops.add_sub += 1;
                Some(p1 - p0)
            } else {
                None
            }
        })
        .collect();
    let sat = saturation.unwrap_or_else(|| {
        margins.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs())).min(LLR_MAX)
    });
    let sat = if sat > 0.0 { sat } else { LLR_MAX };
    margins
        .iter()
        .zip(&best)
        .map(|(m, &[p0, _])| match m {
            Some(x) => x.clamp(-LLR_MAX, LLR_MAX),
            None if p0.is_finite() => sat,
            None => -sat,
        })
        .collect()
}
