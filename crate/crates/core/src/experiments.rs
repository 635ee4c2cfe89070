//! Tabular reproductions of the CHSH scan, the covariance scan, and the
//! Aspect-experiment curve, plus their CSV/metadata emitters.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use crate::criteria::{chsh_value, g_value, ChshConfig, ConfigLabel};
use crate::error::{Error, Result};
use crate::quantum::TwoQubitState;
use crate::scalar::Scalar;

pub const DEFAULT_N_POINTS: usize = 101;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const ALPHA_SQUARED_LABEL: &str = "alpha_squared";
pub const STATE_FAMILY: &str = "(alpha|+-> - beta|-+>), alpha,beta real >= 0, alpha^2+beta^2=1";

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub name: String,
    pub y: Vec<f64>,
}

/// A figure as data: one shared, strictly increasing x column and named y columns.
#[derive(Clone, Debug, PartialEq)]
pub struct FigureScan {
    pub x_label: String,
    pub y_label: String,
    pub x: Vec<f64>,
    pub series: Vec<Series>,
    /// Ordered `key=value` pairs written next to the CSV.
    pub metadata: Vec<(String, String)>,
}

impl FigureScan {
    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.series
            .iter()
            .find(|s| s.name == name)
            .map(|s| s.y.as_slice())
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let mut header = vec![self.x_label.as_str()];
        header.extend(self.series.iter().map(|s| s.name.as_str()));
        writeln!(w, "{}", header.join(","))?;
        for (i, x) in self.x.iter().enumerate() {
            let mut row = vec![format_sig9(*x)];
            row.extend(self.series.iter().map(|s| format_sig9(s.y[i])));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn write_metadata<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (k, v) in &self.metadata {
            writeln!(w, "{k}={v}")?;
        }
        Ok(())
    }

    /// Writes `path` (creating missing parent directories) and the sibling
    /// metadata file (same stem, `.meta` extension).
    /// Returns the metadata path.
    pub fn save(&self, path: &Path) -> Result<PathBuf> {
        let mut csv = Vec::new();
        self.write_csv(&mut csv)?;
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, csv)?;
        let meta_path = metadata_path(path);
        let mut meta = Vec::new();
        self.write_metadata(&mut meta)?;
        fs::write(&meta_path, meta)?;
        Ok(meta_path)
    }
}

pub fn metadata_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta")
}

/// Decimal rendering with nine significant digits, e.g. `-2.82842712`, `0.871312320`.
pub fn format_sig9(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return "0.00000000".to_string();
    }
    let exponent = v.abs().log10().floor() as i32;
    let decimals = (8 - exponent).max(0) as usize;
    let s = format!("{v:.decimals$}");
    // rounding may carry into a new leading digit (9.999999999 -> 10.0000000)
    let rounded: f64 = s.parse().expect("formatted float parses");
    if decimals > 0 && rounded.abs() >= 10f64.powi(exponent + 1) {
        let d = decimals - 1;
        return format!("{v:.d$}");
    }
    s
}

fn check_points(n_points: usize) -> Result<()> {
    if n_points < 2 {
        return Err(Error::TooFewPoints(n_points));
    }
    Ok(())
}

/// `alpha^2` grid `i / (n - 1)`.
pub fn alpha_squared_grid(n_points: usize) -> Vec<f64> {
    let last = (n_points - 1) as f64;
    (0..n_points).map(|i| i as f64 / last).collect()
}

fn configs_meta(configs: &[ConfigLabel]) -> String {
    configs
        .iter()
        .map(|c| format!("{c}:({})", c.angle_literals()))
        .collect::<Vec<_>>()
        .join(";")
}

fn scan_states<T: Scalar>(n_points: usize) -> Vec<(f64, TwoQubitState<T>)> {
    alpha_squared_grid(n_points)
        .into_iter()
        .map(|x| {
            (
                x,
                TwoQubitState::from_alpha_squared(T::lit(x)).expect("grid in [0,1]"),
            )
        })
        .collect()
}

fn analytic_metadata(configs: &[ConfigLabel], n_points: usize) -> Vec<(String, String)> {
    vec![
        ("config".into(), configs_meta(configs)),
        ("state_family".into(), STATE_FAMILY.into()),
        ("seed".into(), "none".into()),
        ("n_points".into(), n_points.to_string()),
        ("tool_version".into(), TOOL_VERSION.into()),
    ]
}

/// `<B>` along the `alpha^2` family for each configuration, with the `+-2` bounds.
pub fn figure1_scan<T: Scalar>(configs: &[ConfigLabel], n_points: usize) -> Result<FigureScan> {
    check_points(n_points)?;
    let states = scan_states::<T>(n_points);
    let mut series: Vec<Series> = configs
        .iter()
        .map(|&label| {
            let cfg = ChshConfig::<T>::named(label);
            Series {
                name: format!("chsh_{label}"),
                y: states
                    .iter()
                    .map(|(_, s)| chsh_value(s, &cfg).as_f64())
                    .collect(),
            }
        })
        .collect();
    series.push(Series {
        name: "local_realism_upper".into(),
        y: vec![2.0; n_points],
    });
    series.push(Series {
        name: "local_realism_lower".into(),
        y: vec![-2.0; n_points],
    });
    Ok(FigureScan {
        x_label: ALPHA_SQUARED_LABEL.into(),
        y_label: "chsh_expectation".into(),
        x: states.iter().map(|(x, _)| *x).collect(),
        series,
        metadata: analytic_metadata(configs, n_points),
    })
}

/// `G(a, b)` and `G(a, b')` along the `alpha^2` family, with the zero line.
pub fn figure2_scan<T: Scalar>(configs: &[ConfigLabel], n_points: usize) -> Result<FigureScan> {
    check_points(n_points)?;
    let states = scan_states::<T>(n_points);
    let mut series = Vec::new();
    for &label in configs {
        let cfg = ChshConfig::<T>::named(label);
        for (suffix, b) in [("ab", cfg.b), ("abp", cfg.b_prime)] {
            series.push(Series {
                name: format!("g_{suffix}_{label}"),
                y: states
                    .iter()
                    .map(|(_, s)| g_value(s, &cfg.a, &b).as_f64())
                    .collect(),
            });
        }
    }
    series.push(Series {
        name: "local_realism".into(),
        y: vec![0.0; n_points],
    });
    Ok(FigureScan {
        x_label: ALPHA_SQUARED_LABEL.into(),
        y_label: "g".into(),
        x: states.iter().map(|(x, _)| *x).collect(),
        series,
        metadata: analytic_metadata(configs, n_points),
    })
}

/// Polarizer transmissions and the angular factor of the photon-pair experiment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AspectRates {
    pub eff1_plus: f64,
    pub eff1_minus: f64,
    pub eff2_plus: f64,
    pub eff2_minus: f64,
    pub angular_factor: f64,
}

impl AspectRates {
    /// Values reported for the 1982 two-channel polarizer experiment.
    pub fn aspect() -> Self {
        Self {
            eff1_plus: 0.971,
            eff1_minus: 0.029,
            eff2_plus: 0.968,
            eff2_minus: 0.028,
            angular_factor: 0.984,
        }
    }

    /// Perfect polarizers and collection: coefficient exactly 1.
    pub fn ideal() -> Self {
        Self {
            eff1_plus: 1.0,
            eff1_minus: 0.0,
            eff2_plus: 1.0,
            eff2_minus: 0.0,
            angular_factor: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("eff1_plus", self.eff1_plus),
            ("eff1_minus", self.eff1_minus),
            ("eff2_plus", self.eff2_plus),
            ("eff2_minus", self.eff2_minus),
            ("angular_factor", self.angular_factor),
        ];
        for (name, value) in fields {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::OutOfRange {
                    name,
                    value,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
        }
        Ok(())
    }

    /// Amplitude `F` of `G(phi) = F cos 2 phi`.
    pub fn coefficient(&self) -> f64 {
        (self.eff1_plus - self.eff1_minus)
            * (self.eff2_plus - self.eff2_minus)
            * self.angular_factor
    }

    /// Quantum prediction for photon polarizers at relative angle `phi`.
    pub fn g(&self, phi: f64) -> f64 {
        self.coefficient() * (2.0 * phi).cos()
    }
}

impl Default for AspectRates {
    fn default() -> Self {
        Self::aspect()
    }
}

/// Photon-form curve `F cos 2 phi` over `phi in [0, pi]` with the zero line.
pub fn figure3_curve(rates: &AspectRates, n_points: usize) -> Result<FigureScan> {
    check_points(n_points)?;
    rates.validate()?;
    let last = (n_points - 1) as f64;
    let x: Vec<f64> = (0..n_points)
        .map(|i| std::f64::consts::PI * i as f64 / last)
        .collect();
    let metadata = vec![
        (
            "config".into(),
            format!(
                "eff1=({},{}),eff2=({},{}),angular_factor={}",
                rates.eff1_plus,
                rates.eff1_minus,
                rates.eff2_plus,
                rates.eff2_minus,
                rates.angular_factor
            ),
        ),
        (
            "state_family".into(),
            "photon pair, polarization form cos(2 phi)".into(),
        ),
        ("seed".into(), "none".into()),
        ("n_points".into(), n_points.to_string()),
        ("tool_version".into(), TOOL_VERSION.into()),
    ];
    Ok(FigureScan {
        x_label: "phi".into(),
        y_label: "g".into(),
        series: vec![
            Series {
                name: "g_quantum".into(),
                y: x.iter().map(|&p| rates.g(p)).collect(),
            },
            Series {
                name: "local_realism".into(),
                y: vec![0.0; n_points],
            },
        ],
        x,
        metadata,
    })
}

/// `4 (R(phi)/R0 - (R1/R0)(R2/R0))` from measured rate ratios.
pub fn g_from_rates(rate_ratio: f64, r1: f64, r2: f64) -> Result<f64> {
    for (name, value) in [("rate_ratio", rate_ratio), ("r1", r1), ("r2", r2)] {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::OutOfRange {
                name,
                value,
                lo: 0.0,
                hi: 1.0,
            });
        }
    }
    Ok(4.0 * (rate_ratio - r1 * r2))
}
