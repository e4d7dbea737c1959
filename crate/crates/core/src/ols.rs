//! Least-squares fitting by Householder QR.
//!
//! Columns are equilibrated to unit Euclidean norm before factorization; the
//! minimizer is unchanged and the trend-modulated columns (which grow with
//! `t`) no longer dominate the conditioning. Factorization is unpivoted, so
//! a vanishing diagonal entry of `R` identifies the first column that is a
//! linear combination of the columns before it.

use std::io::{BufRead, Write};

use crate::design::DesignMatrix;

/// Condition estimates above this are reported through `log::warn!`.
pub const CONDITION_WARN: f64 = 1e10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OlsError {
    #[error("design matrix is rank deficient at column '{column}'")]
    RankDeficient { column: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("coefficient labels do not match design matrix columns")]
    LabelMismatch { expected: Vec<String>, found: Vec<String> },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("coefficient file line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for OlsError {
    fn from(e: std::io::Error) -> Self {
        OlsError::Io(e.to_string())
    }
}

/// Fitted coefficient vector with column labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    pub labels: Vec<String>,
    pub values: Vec<f64>,
    /// 1-norm condition number of the column-equilibrated design matrix.
    pub condition_estimate: f64,
    /// Classical OLS standard errors; absent when there are no residual
    /// degrees of freedom or when loaded from disk.
    pub std_errors: Option<Vec<f64>>,
}

impl Coefficients {
    pub fn get(&self, label: &str) -> Option<f64> {
        self.labels.iter().position(|l| l == label).map(|i| self.values[i])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Writes `label,value` rows under a header line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "label,value")?;
        for (l, v) in self.labels.iter().zip(&self.values) {
            writeln!(w, "{l},{v}")?;
        }
        Ok(())
    }

    /// Reads rows written by [`Coefficients::write_csv`]; `#` lines are skipped.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self, OlsError> {
        let mut labels = Vec::new();
        let mut values = Vec::new();
        let mut header_seen = false;
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let text = line.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            if !header_seen {
                if text != "label,value" {
                    return Err(OlsError::Parse {
                        line: i + 1,
                        reason: format!("expected header 'label,value', got '{text}'"),
                    });
                }
                header_seen = true;
                continue;
            }
            let (l, v) = text.rsplit_once(',').ok_or_else(|| OlsError::Parse {
                line: i + 1,
                reason: "expected 'label,value'".into(),
            })?;
            let v: f64 = v.parse().map_err(|_| OlsError::Parse {
                line: i + 1,
                reason: format!("bad value '{v}'"),
            })?;
            if !v.is_finite() {
                return Err(OlsError::NonFinite("coefficient file"));
            }
            labels.push(l.to_string());
            values.push(v);
        }
        Ok(Self {
            labels,
            values,
            condition_estimate: f64::NAN,
            std_errors: None,
        })
    }
}

/// Minimizes `‖F a − target‖₂` over rows `first_valid_row..` of `f`.
///
/// `target` has one entry per row of `f`; entries before `first_valid_row`
/// are ignored.
pub fn fit(f: &DesignMatrix, target: &[f64]) -> Result<Coefficients, OlsError> {
    if target.len() != f.n_rows() {
        return Err(OlsError::DimensionMismatch(format!(
            "target has {} entries, matrix has {} rows",
            target.len(),
            f.n_rows()
        )));
    }
    let lo = f.first_valid_row();
    let m = f.n_rows() - lo;
    let n = f.n_cols();
    if n == 0 || m < n {
        return Err(OlsError::DimensionMismatch(format!(
            "{m} usable rows for {n} columns"
        )));
    }
    let b: Vec<f64> = target[lo..].to_vec();
    if b.iter().any(|v| !v.is_finite()) {
        return Err(OlsError::NonFinite("target"));
    }

    // Equilibrated copy, column-major.
    let mut a = Vec::with_capacity(m * n);
    let mut scale = Vec::with_capacity(n);
    for j in 0..n {
        let col = &f.column(j)[lo..];
        if col.iter().any(|v| !v.is_finite()) {
            return Err(OlsError::NonFinite("design matrix"));
        }
        let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(OlsError::RankDeficient {
                column: f.labels()[j].clone(),
            });
        }
        a.extend(col.iter().map(|v| v / norm));
        scale.push(norm);
    }

    let qr = householder_qr(&mut a, m, n);
    let tol = (m.max(n) as f64) * f64::EPSILON;
    if let Some(j) = qr.diag.iter().position(|r| r.abs() <= tol) {
        return Err(OlsError::RankDeficient {
            column: f.labels()[j].clone(),
        });
    }

    // Qᵗb
    let mut qtb = b.clone();
    for (k, v) in qr.reflectors.iter().enumerate() {
        apply_reflector(v, &mut qtb[k..]);
    }

    let r = |i: usize, j: usize| if i == j { qr.diag[i] } else { a[j * m + i] };
    let rinv = upper_inverse(n, &r);
    let condition = norm1_upper(n, &r) * norm1_upper(n, &|i, j| rinv[j * n + i]);
    if !condition.is_finite() || condition * f64::EPSILON >= 1.0 {
        let worst = (0..n)
            .min_by(|&x, &y| qr.diag[x].abs().total_cmp(&qr.diag[y].abs()))
            .expect("n > 0");
        return Err(OlsError::RankDeficient {
            column: f.labels()[worst].clone(),
        });
    }
    if condition > CONDITION_WARN {
        log::warn!("ill-conditioned design matrix (condition estimate {condition:.3e})");
    }

    // Back substitution on the scaled system, then undo the column scaling.
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| r(i, j) * x[j]).sum();
        x[i] = (qtb[i] - s) / r(i, i);
    }
    let values: Vec<f64> = x.iter().zip(&scale).map(|(v, s)| v / s).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(OlsError::NonFinite("coefficients"));
    }

    let std_errors = (m > n).then(|| {
        let rss: f64 = qtb[n..].iter().map(|v| v * v).sum();
        let sigma2 = rss / (m - n) as f64;
        (0..n)
            .map(|i| {
                let row: f64 = (i..n).map(|k| rinv[k * n + i].powi(2)).sum();
                (sigma2 * row).sqrt() / scale[i]
            })
            .collect()
    });

    Ok(Coefficients {
        labels: f.labels().to_vec(),
        values,
        condition_estimate: condition,
        std_errors,
    })
}

/// `F a` for rows `first_valid_row..` of `f`.
pub fn predict(f: &DesignMatrix, coef: &Coefficients) -> Result<Vec<f64>, OlsError> {
    if f.labels() != coef.labels.as_slice() {
        return Err(OlsError::LabelMismatch {
            expected: coef.labels.clone(),
            found: f.labels().to_vec(),
        });
    }
    let lo = f.first_valid_row();
    let mut y = vec![0.0; f.n_rows() - lo];
    for (j, a) in coef.values.iter().enumerate() {
        for (yi, x) in y.iter_mut().zip(&f.column(j)[lo..]) {
            *yi += a * x;
        }
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(OlsError::NonFinite("predictions"));
    }
    Ok(y)
}

struct Qr {
    diag: Vec<f64>,
    reflectors: Vec<Vec<f64>>,
}

// In-place Householder QR of an m×n column-major matrix. On return the strict
// upper triangle of `a` holds R (the diagonal is returned separately) and
// `reflectors[k]` is the unit Householder vector acting on rows k..m.
fn householder_qr(a: &mut [f64], m: usize, n: usize) -> Qr {
    let mut diag = Vec::with_capacity(n);
    let mut reflectors = Vec::with_capacity(n);
    for k in 0..n {
        let col = &a[k * m + k..(k + 1) * m];
        let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            diag.push(0.0);
            reflectors.push(vec![0.0; m - k]);
            continue;
        }
        let alpha = if col[0] > 0.0 { -norm } else { norm };
        let mut v = col.to_vec();
        v[0] -= alpha;
        let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vnorm > 0.0 {
            v.iter_mut().for_each(|x| *x /= vnorm);
        }
        for j in k + 1..n {
            apply_reflector(&v, &mut a[j * m + k..(j + 1) * m]);
        }
        diag.push(alpha);
        reflectors.push(v);
    }
    Qr { diag, reflectors }
}

fn apply_reflector(v: &[f64], x: &mut [f64]) {
    let dot: f64 = v.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
    let s = 2.0 * dot;
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi -= s * vi;
    }
}

// Inverse of an upper-triangular matrix given by accessor, column-major.
fn upper_inverse(n: usize, r: &dyn Fn(usize, usize) -> f64) -> Vec<f64> {
    let mut inv = vec![0.0; n * n];
    for j in 0..n {
        inv[j * n + j] = 1.0 / r(j, j);
        for i in (0..j).rev() {
            let s: f64 = (i + 1..=j).map(|k| r(i, k) * inv[j * n + k]).sum();
            inv[j * n + i] = -s / r(i, i);
        }
    }
    inv
}

fn norm1_upper(n: usize, r: &dyn Fn(usize, usize) -> f64) -> f64 {
    (0..n)
        .map(|j| (0..=j).map(|i| r(i, j).abs()).sum::<f64>())
        .fold(0.0, f64::max)
}
