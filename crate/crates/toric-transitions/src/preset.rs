//! Built-in inputs for the worked transition families.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::input::{BlowupSection, InputDocument, Options, Request};

fn param(params: &BTreeMap<String, i64>, key: &str, default: i64) -> i64 {
    params.get(key).copied().unwrap_or(default)
}

/// Construct a named preset. Parametric presets read `m`, `k`, `d` (and the
/// product preset `m1`, `m2`, `k1`, `k2`, `d1`, `d2`) from the parameters.
pub fn preset(name: &str, params: &BTreeMap<String, i64>) -> Result<InputDocument> {
    match name {
        "quintic-conifold" => Ok(hypersurface_doc(5, &[0, 1], vec![1, 1, 1, 1, 1])),
        "cubic-transition" => Ok(hypersurface_doc(5, &[0, 1, 2, 3], vec![1, 1, 1, 1, 1])),
        "proj-hypersurface" => {
            let m = param(params, "m", 5);
            let k = param(params, "k", 2);
            let d = param(params, "d", 5);
            if m < 3 || k < 1 || k >= m || d < 1 {
                return Err(Error::Schema(format!(
                    "proj-hypersurface needs 1 <= k < m and d >= 1, got m={m} k={k} d={d}"
                )));
            }
            let m = m as usize;
            let mut a = vec![0i64; m];
            a[m - 1] = d;
            let center: Vec<usize> = (0..k as usize).collect();
            Ok(hypersurface_doc(m, &center, a))
        }
        "product-proj" => {
            let m1 = param(params, "m1", 2);
            let m2 = param(params, "m2", 3);
            let k1 = param(params, "k1", 1);
            let k2 = param(params, "k2", 1);
            let d1 = param(params, "d1", 1);
            let d2 = param(params, "d2", 1);
            if m1 < 2 || m2 < 2 || k1 < 0 || k2 < 0 || k1 >= m1 || k2 >= m2 || k1 + k2 < 1 {
                return Err(Error::Schema(
                    "product-proj needs 0 <= k_j < m_j with k1 + k2 >= 1".into(),
                ));
            }
            let (m1, m2, k1, k2) = (m1 as usize, m2 as usize, k1 as usize, k2 as usize);
            let mut characters = Vec::new();
            for _ in 0..m1 {
                characters.push(vec![1, 0]);
            }
            for _ in 0..m2 {
                characters.push(vec![0, 1]);
            }
            let mut a = vec![0i64; m1 + m2];
            a[m1 - 1] = d1;
            a[m1 + m2 - 1] = d2;
            let mut center: Vec<usize> = (0..k1).collect();
            center.extend(m1..m1 + k2);
            Ok(InputDocument {
                torus_rank: 2,
                characters,
                stability: vec![int_field(1), int_field(1)],
                divisor: Some(a),
                blowup: Some(BlowupSection { center, weights: None, epsilon: None }),
                request: Request::Transition,
                options: Some(Options { narrow: true, sectors: true }),
            })
        }
        "weighted-p11122-8" => Ok(InputDocument {
            torus_rank: 1,
            characters: vec![vec![1], vec![1], vec![1], vec![2], vec![2], vec![1]],
            stability: vec![int_field(1)],
            divisor: Some(vec![0, 0, 0, 0, 0, 8]),
            blowup: Some(BlowupSection { center: vec![0, 1], weights: None, epsilon: None }),
            request: Request::Transition,
            options: Some(Options { narrow: true, sectors: true }),
        }),
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

pub fn preset_names() -> &'static [&'static str] {
    &[
        "quintic-conifold",
        "proj-hypersurface",
        "cubic-transition",
        "product-proj",
        "weighted-p11122-8",
    ]
}

fn int_field(n: i64) -> crate::input::RatField {
    crate::input::RatField(crate::kernel::rat::int(n))
}

fn hypersurface_doc(m: usize, center: &[usize], a: Vec<i64>) -> InputDocument {
    InputDocument {
        torus_rank: 1,
        characters: vec![vec![1]; m],
        stability: vec![int_field(1)],
        divisor: Some(a),
        blowup: Some(BlowupSection { center: center.to_vec(), weights: None, epsilon: None }),
        request: Request::Transition,
        options: Some(Options { narrow: true, sectors: true }),
    }
}
