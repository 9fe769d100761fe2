use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use crate::failure::Failure;

/// A number, a comma list `a,b,c` or a range `start:stop:step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Values {
    One(f64),
    Spec(String),
}

impl Values {
    fn from_flag(s: &str) -> Values {
        s.trim().parse().map(Values::One).unwrap_or_else(|_| Values::Spec(s.trim().to_string()))
    }

    pub fn expand(&self, name: &str) -> Result<Vec<f64>, Failure> {
        let bad = |why: &str| Failure::invalid(format!("{name}: {why}"));
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(&format!("'{s}' is not a number")));
        let out = match self {
            Values::One(v) => vec![*v],
            Values::Spec(s) if s.contains(':') => {
                let parts: Vec<&str> = s.split(':').collect();
                let [start, stop, step] = parts[..] else {
                    return Err(bad("range must be start:stop:step"));
                };
                let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
                if !(step > 0.0) || stop < start {
                    return Err(bad("range needs step > 0 and stop >= start"));
                }
                let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                // round away the accumulated binary noise so 0.4:2:0.2 yields 0.6, not 0.6000000000000001
                (0..count).map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12).collect()
            }
            Values::Spec(s) => s.split(',').map(num).collect::<Result<_, _>>()?,
        };
        if out.is_empty() || out.iter().any(|v| !v.is_finite()) {
            return Err(bad("no finite values"));
        }
        Ok(out)
    }

    pub fn single(&self, name: &str) -> Result<f64, Failure> {
        match self.expand(name)?.as_slice() {
            [v] => Ok(*v),
            _ => Err(Failure::invalid(format!("{name}: expected a single value"))),
        }
    }
}

/// Every knob of every subcommand. Unset fields fall back to per-subcommand defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subcommand: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Values>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<Values>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub half_length: Option<f64>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

/// Flags shared by all subcommands; each overrides the same key of the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Dispersion order α (number, list or start:stop:step).
    #[arg(long)]
    pub alpha: Option<String>,
    /// Nonlinearity power p (number, list or start:stop:step).
    #[arg(long)]
    pub p: Option<String>,
    /// Wave speed.
    #[arg(long)]
    pub c: Option<f64>,
    /// Vortex strength ε.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Vortex depth.
    #[arg(long)]
    pub a: Option<f64>,
    /// Gravity.
    #[arg(long)]
    pub g: Option<f64>,
    /// Surface tension.
    #[arg(long)]
    pub b: Option<f64>,
    /// Half length of the periodic box.
    #[arg(long = "L")]
    pub half_length: Option<f64>,
    /// Number of grid points.
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Dirichlet-Neumann expansion order.
    #[arg(long = "M")]
    pub order: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Final time.
    #[arg(long = "T")]
    pub t_final: Option<f64>,
    /// Perturbation size.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Solver tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Step in a for the d'' central difference.
    #[arg(long)]
    pub h_a: Option<f64>,
    /// Eigenvalues with |λ| below this count as zero.
    #[arg(long)]
    pub zero_tol: Option<f64>,
    /// random_even or negative_mode.
    #[arg(long)]
    pub direction: Option<String>,
    /// Record every stride-th step.
    #[arg(long)]
    pub stride: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::invalid(format!("config {}: {e}", path.display())))
    }

    /// Overlay the command line on top of the file.
    pub fn with_flags(mut self, subcommand: &str, flags: &Flags, out: Option<PathBuf>) -> Result<RunConfig, Failure> {
        if let Some(s) = &self.subcommand {
            if s != subcommand {
                return Err(Failure::invalid(format!("config is for '{s}' but '{subcommand}' was requested")));
            }
        }
        self.subcommand = Some(subcommand.to_string());
        macro_rules! overlay {
            ($($f:ident),*) => { $( if flags.$f.is_some() { self.$f = flags.$f.clone(); } )* };
        }
        overlay!(c, eps, a, g, b, half_length, n, order, dt, t_final, delta, tol, max_iter, seed, h_a, zero_tol, direction, stride);
        if let Some(s) = &flags.alpha {
            self.alpha = Some(Values::from_flag(s));
        }
        if let Some(s) = &flags.p {
            self.p = Some(Values::from_flag(s));
        }
        if out.is_some() {
            self.out = out;
        }
        Ok(self)
    }

    /// Fill every key the subcommand reads with its default, and reject keys it does not read.
    pub fn resolve(mut self) -> Result<RunConfig, Failure> {
        let sub = self.subcommand.clone().unwrap_or_default();
        let allowed: &[&str] = match sub.as_str() {
            "ground-state" => &["alpha", "p", "L", "N", "tol", "max_iter"],
            "stability-map" => &["alpha", "p", "L", "N", "tol", "max_iter"],
            "spectrum" => &["alpha", "p", "c", "L", "N", "tol", "max_iter", "zero_tol"],
            "evolve" => &["alpha", "p", "c", "L", "N", "tol", "max_iter", "dt", "T", "delta", "seed", "direction", "stride"],
            "pv-solve" => &["eps", "a", "g", "b", "L", "N", "M", "tol"],
            "pv-d2" => &["eps", "a", "g", "b", "L", "N", "M", "tol", "h_a"],
            "pv-spectrum" => &["eps", "a", "g", "b", "L", "N", "M", "tol", "zero_tol"],
            "pv-evolve" => &["eps", "a", "g", "b", "L", "N", "M", "tol", "dt", "T", "delta", "stride"],
            "check" => &[],
            other => return Err(Failure::invalid(format!("unknown subcommand '{other}'"))),
        };
        let present = serde_json::to_value(&self).expect("config serializes");
        for key in present.as_object().expect("object").keys() {
            if key != "subcommand" && key != "out" && !allowed.contains(&key.as_str()) {
                return Err(Failure::invalid(format!("'{key}' is not a parameter of {sub}")));
            }
        }
        let fkdv = matches!(sub.as_str(), "ground-state" | "stability-map" | "spectrum" | "evolve");
        let pv = sub.starts_with("pv-");
        if fkdv {
            if sub == "stability-map" {
                self.alpha.get_or_insert(Values::Spec("0.4:2:0.2".into()));
                self.p.get_or_insert(Values::Spec("2,3,4,6".into()));
                self.half_length.get_or_insert(400.0);
                self.n.get_or_insert(8192);
                self.tol.get_or_insert(1e-11);
            } else {
                self.alpha.get_or_insert(Values::One(2.0));
                self.p.get_or_insert(Values::One(2.0));
                self.half_length.get_or_insert(50.0);
                self.n.get_or_insert(if sub == "ground-state" { 1024 } else { 512 });
                self.tol.get_or_insert(1e-12);
            }
            self.max_iter.get_or_insert(20000);
        }
        if matches!(sub.as_str(), "spectrum" | "evolve") {
            self.c.get_or_insert(1.0);
        }
        if sub == "spectrum" {
            self.zero_tol.get_or_insert(1e-6);
        }
        if sub == "evolve" {
            self.t_final.get_or_insert(50.0);
            self.delta.get_or_insert(1e-3);
            self.seed.get_or_insert(7);
            self.direction.get_or_insert("random_even".into());
            self.stride.get_or_insert(50);
        }
        if pv {
            self.eps.get_or_insert(1e-2);
            self.a.get_or_insert(1.0);
            self.g.get_or_insert(1.0);
            self.b.get_or_insert(1.0);
            self.half_length.get_or_insert(32.0);
            self.n.get_or_insert(512);
            self.order.get_or_insert(4);
            self.tol.get_or_insert(1e-12);
        }
        if sub == "pv-d2" {
            let a = self.a.expect("set above");
            self.h_a.get_or_insert(0.05 * a);
        }
        if sub == "pv-spectrum" {
            self.zero_tol.get_or_insert(1e-7);
        }
        if sub == "pv-evolve" {
            self.t_final.get_or_insert(5.0);
            self.delta.get_or_insert(0.0);
            self.stride.get_or_insert(10);
        }
        self.out.get_or_insert(PathBuf::from("hamwave-out"));
        if let Some(d) = &self.direction {
            if d != "random_even" && d != "negative_mode" {
                return Err(Failure::invalid(format!("direction must be random_even or negative_mode, got '{d}'")));
            }
        }
        for (name, v) in [("c", self.c), ("L", self.half_length), ("dt", self.dt), ("T", self.t_final), ("tol", self.tol), ("h_a", self.h_a), ("zero_tol", self.zero_tol)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Failure::invalid(format!("{name} must be positive, got {v}")));
                }
            }
        }
        if let Some(d) = self.delta {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(Failure::invalid(format!("delta must be nonnegative, got {d}")));
            }
        }
        if let Some(alpha) = &self.alpha {
            alpha.expand("alpha")?;
        }
        if let Some(p) = &self.p {
            for v in p.expand("p")? {
                if v.fract() != 0.0 || v < 2.0 {
                    return Err(Failure::invalid(format!("p must be an integer >= 2, got {v}")));
                }
            }
        }
        Ok(self)
    }

    pub fn alphas(&self) -> Result<Vec<f64>, Failure> {
        self.alpha.as_ref().expect("resolved").expand("alpha")
    }

    pub fn powers(&self) -> Result<Vec<u32>, Failure> {
        Ok(self.p.as_ref().expect("resolved").expand("p")?.into_iter().map(|v| v as u32).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_lists() {
        assert_eq!(Values::Spec("0.4:2:0.2".into()).expand("alpha").unwrap(), vec![0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0]);
        assert_eq!(Values::Spec("2,3,4,6".into()).expand("p").unwrap(), vec![2.0, 3.0, 4.0, 6.0]);
        assert_eq!(Values::from_flag("1.5"), Values::One(1.5));
        assert!(Values::Spec("1:0:1".into()).expand("x").is_err());
        assert!(Values::Spec("1:2".into()).expand("x").is_err());
        assert!(Values::Spec("a,b".into()).expand("x").is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"alpha": 2, "bogus": 1}"#).is_err());
        let c: RunConfig = serde_json::from_str(r#"{"alpha": "1:2:0.5", "N": 256}"#).unwrap();
        assert_eq!(c.n, Some(256));
    }

    #[test]
    fn flags_override_file_and_defaults_fill_in() {
        let file: RunConfig = serde_json::from_str(r#"{"eps": 0.02, "N": 256}"#).unwrap();
        let flags = Flags { n: Some(128), ..Flags::default() };
        let c = file.with_flags("pv-solve", &flags, None).unwrap().resolve().unwrap();
        assert_eq!((c.eps, c.n, c.a, c.order), (Some(0.02), Some(128), Some(1.0), Some(4)));
    }

    #[test]
    fn foreign_parameters_rejected() {
        let flags = Flags { eps: Some(0.1), ..Flags::default() };
        assert!(RunConfig::default().with_flags("ground-state", &flags, None).unwrap().resolve().is_err());
    }
}
