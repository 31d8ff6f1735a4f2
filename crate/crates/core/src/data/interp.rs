use super::RawSeries;
use crate::{Error, Result};

/// Fills missing readings channel by channel. Interior gaps are linear in the
/// sample index; leading and trailing gaps hold the nearest present value.
pub fn interpolate_missing(series: &RawSeries) -> Result<RawSeries> {
    let mut out = series.clone();
    let k = series.channels();
    let n = series.len();
    for ch in 0..k {
        let mut col = series.channel(ch);
        fill_column(&mut col)
            .map_err(|()| Error::Data(format!("channel {} has no present values", ch + 1)))?;
        let values = out.values_mut();
        for (t, v) in col.into_iter().enumerate() {
            values[t * k + ch] = v;
        }
    }
    debug_assert!(n == 0 || !out.has_missing());
    Ok(out)
}

fn fill_column(col: &mut [f64]) -> Result<(), ()> {
    if col.is_empty() {
        return Ok(());
    }
    let present: Vec<usize> = (0..col.len()).filter(|&i| !col[i].is_nan()).collect();
    let (&first, &last) = match (present.first(), present.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(()),
    };
    let head = col[first];
    col[..first].iter_mut().for_each(|v| *v = head);
    let tail = col[last];
    col[last + 1..].iter_mut().for_each(|v| *v = tail);
    for pair in present.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b - a < 2 {
            continue;
        }
        let (va, vb) = (col[a], col[b]);
        let span = (b - a) as f64;
        for i in a + 1..b {
            let frac = (i - a) as f64 / span;
            col[i] = va + (vb - va) * frac;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(vals: &[f64]) -> RawSeries {
        RawSeries::new(1, vals.to_vec(), vec![0; vals.len()]).unwrap()
    }

    const M: f64 = f64::NAN;

    #[test]
    fn midpoint() {
        let s = interpolate_missing(&single(&[1.0, M, 3.0])).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn two_step_gap() {
        let s = interpolate_missing(&single(&[0.0, M, M, 3.0])).unwrap();
        assert_eq!(s.values(), &[0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn edges_hold_nearest() {
        let s = interpolate_missing(&single(&[M, 5.0])).unwrap();
        assert_eq!(s.values(), &[5.0, 5.0]);
        let s = interpolate_missing(&single(&[M, 2.0, M, 4.0, M, M])).unwrap();
        assert_eq!(s.values(), &[2.0, 2.0, 3.0, 4.0, 4.0, 4.0]);
    }

    #[test]
    fn all_missing_channel_errors() {
        let s = RawSeries::new(2, vec![1.0, M, 2.0, M], vec![0, 0]).unwrap();
        let err = interpolate_missing(&s).unwrap_err();
        assert!(matches!(err, Error::Data(ref m) if m.contains("channel 2")));
    }

    #[test]
    fn channels_are_independent() {
        let s = RawSeries::new(2, vec![0.0, 10.0, M, M, 4.0, 30.0], vec![0; 3]).unwrap();
        let s = interpolate_missing(&s).unwrap();
        assert_eq!(s.channel(0), vec![0.0, 2.0, 4.0]);
        assert_eq!(s.channel(1), vec![10.0, 20.0, 30.0]);
    }
}
