//! Flat `key=value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. List-valued keys take
//! comma-separated values.
//!
//! | key           | meaning                                           | default   |
//! |---------------|---------------------------------------------------|-----------|
//! | `kappa`       | curvatures (list, each ≤ 0 for domain suites)     | `0`       |
//! | `dim`         | dimensions (list)                                 | `2`       |
//! | `radius`      | ball radii (list)                                 | `1`       |
//! | `alpha_min`   | first Robin parameter                             | `-1`      |
//! | `alpha_max`   | last Robin parameter (≤ 0)                        | `0`       |
//! | `alpha_steps` | number of equally spaced α values                 | `5`       |
//! | `mesh_h`      | target edge length for meshed domains             | `0.04`    |
//! | `family`      | `ball`, `disk`, `ellipse` or `perturbed`          | `ball`    |
//! | `ratio`       | ellipse axis ratios a/b (list)                    | `1.5`     |
//! | `eps`         | perturbation amplitudes (list)                    | `0.1`     |
//! | `mode_k`      | perturbation modes (list)                         | `3`       |
//! | `tolerance`   | slack for FEM-versus-ball comparisons             | `0.01`    |

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Ball,
    Disk,
    Ellipse,
    Perturbed,
}

impl Family {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "ball" => Ok(Family::Ball),
            "disk" => Ok(Family::Disk),
            "ellipse" => Ok(Family::Ellipse),
            "perturbed" => Ok(Family::Perturbed),
            _ => Err(Error::Parse(format!("unknown family '{s}'"))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Family::Ball => "ball",
            Family::Disk => "disk",
            Family::Ellipse => "ellipse",
            Family::Perturbed => "perturbed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub kappa: Vec<f64>,
    pub dim: Vec<usize>,
    pub radius: Vec<f64>,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_steps: usize,
    pub mesh_h: f64,
    pub family: Family,
    pub ratio: Vec<f64>,
    pub eps: Vec<f64>,
    pub mode_k: Vec<u32>,
    pub tolerance: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            kappa: vec![0.0],
            dim: vec![2],
            radius: vec![1.0],
            alpha_min: -1.0,
            alpha_max: 0.0,
            alpha_steps: 5,
            mesh_h: 0.04,
            family: Family::Ball,
            ratio: vec![1.5],
            eps: vec![0.1],
            mode_k: vec![3],
            tolerance: 1e-2,
        }
    }
}

const PRESET_DEFAULT: &str = "\
# balls in the flat and hyperbolic spaces, full admissible alpha range
kappa=0,-1
dim=2,3
radius=0.5,1
alpha_min=-1
alpha_max=0
alpha_steps=5
family=ellipse
ratio=1.5
mesh_h=0.08
";

const PRESET_ALPHA_GRID: &str = "\
kappa=0,-1
dim=2
radius=1
alpha_min=-1
alpha_max=0
alpha_steps=5
";

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v.trim().parse().map_err(|_| Error::Parse(format!("{key}: '{v}' is not a number")))?;
    if !x.is_finite() {
        return Err(Error::Parse(format!("{key}: value must be finite")));
    }
    Ok(x)
}

fn parse_list<T>(key: &str, v: &str, one: impl Fn(&str, &str) -> Result<T>) -> Result<Vec<T>> {
    let items: Vec<T> = v.split(',').map(|s| one(key, s)).collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(Error::Parse(format!("{key}: empty list")));
    }
    Ok(items)
}

fn parse_uint<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| Error::Parse(format!("{key}: '{v}' is not a non-negative integer")))
}

impl RunConfig {
    /// A file path, or one of the preset names `default` and `alpha_grid`.
    pub fn load(source: &str) -> Result<Self> {
        let path = std::path::Path::new(source);
        if path.is_file() {
            let text = std::fs::read_to_string(path)?;
            return RunConfig::parse(&text);
        }
        match source {
            "default" => RunConfig::parse(PRESET_DEFAULT),
            "alpha_grid" => RunConfig::parse(PRESET_ALPHA_GRID),
            _ => Err(Error::Parse(format!("config '{source}' is neither a file nor a preset"))),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        let mut seen = std::collections::HashSet::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| Error::Parse(format!("line {}: expected key=value", n + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(Error::Parse(format!("line {}: duplicate key '{key}'", n + 1)));
            }
            match key {
                "kappa" => c.kappa = parse_list(key, value, parse_f64)?,
                "dim" => c.dim = parse_list(key, value, parse_uint)?,
                "radius" => c.radius = parse_list(key, value, parse_f64)?,
                "alpha_min" => c.alpha_min = parse_f64(key, value)?,
                "alpha_max" => c.alpha_max = parse_f64(key, value)?,
                "alpha_steps" => c.alpha_steps = parse_uint(key, value)?,
                "mesh_h" => c.mesh_h = parse_f64(key, value)?,
                "family" => c.family = Family::parse(value)?,
                "ratio" => c.ratio = parse_list(key, value, parse_f64)?,
                "eps" => c.eps = parse_list(key, value, parse_f64)?,
                "mode_k" => c.mode_k = parse_list(key, value, parse_uint)?,
                "tolerance" => c.tolerance = parse_f64(key, value)?,
                _ => return Err(Error::Parse(format!("line {}: unknown key '{key}'", n + 1))),
            }
        }
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        if self.alpha_max > 0.0 {
            return Err(Error::Parse(format!("alpha_max must be ≤ 0, got {}", self.alpha_max)));
        }
        if self.alpha_min > self.alpha_max {
            return Err(Error::Parse("alpha_min exceeds alpha_max".into()));
        }
        if self.alpha_steps == 0 || (self.alpha_steps == 1 && self.alpha_min != self.alpha_max) {
            return Err(Error::Parse("alpha_steps must be ≥ 2 unless alpha_min = alpha_max".into()));
        }
        if self.dim.iter().any(|&d| d < 2) {
            return Err(Error::Parse("dim entries must be ≥ 2".into()));
        }
        if self.radius.iter().any(|&r| !(r > 0.0)) {
            return Err(Error::Parse("radius entries must be positive".into()));
        }
        if !(self.mesh_h > 0.0) || !(self.tolerance >= 0.0) {
            return Err(Error::Parse("mesh_h must be positive and tolerance non-negative".into()));
        }
        Ok(())
    }

    pub fn alphas(&self) -> Vec<f64> {
        if self.alpha_steps == 1 {
            return vec![self.alpha_min];
        }
        let n = self.alpha_steps - 1;
        (0..=n)
            .map(|i| if i == n { self.alpha_max } else { self.alpha_min + (self.alpha_max - self.alpha_min) * i as f64 / n as f64 })
            .collect()
    }

    /// Normalized `key=value` text; equal configurations give equal text.
    pub fn canonical(&self) -> String {
        fn list<T: std::fmt::Debug>(v: &[T]) -> String {
            v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",")
        }
        format!(
            "alpha_max={:?}\nalpha_min={:?}\nalpha_steps={}\ndim={}\neps={}\nfamily={}\nkappa={}\nmesh_h={:?}\nmode_k={}\nradius={}\nratio={}\ntolerance={:?}\n",
            self.alpha_max,
            self.alpha_min,
            self.alpha_steps,
            list(&self.dim),
            list(&self.eps),
            self.family.name(),
            list(&self.kappa),
            self.mesh_h,
            list(&self.mode_k),
            list(&self.radius),
            list(&self.ratio),
            self.tolerance,
        )
    }

    pub fn hash(&self) -> String {
        sha256_hex(self.canonical().as_bytes())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse() {
        let g = RunConfig::load("alpha_grid").unwrap();
        assert_eq!(g.alphas(), vec![-1.0, -0.75, -0.5, -0.25, 0.0]);
        assert_eq!(g.kappa, vec![0.0, -1.0]);
        RunConfig::load("default").unwrap();
        assert!(RunConfig::load("no_such_preset").is_err());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RunConfig::parse("alpha_max=0.5").is_err());
        assert!(RunConfig::parse("kappa=0\nkappa=1").is_err());
        assert!(RunConfig::parse("bogus=1").is_err());
        assert!(RunConfig::parse("dim=1").is_err());
        assert!(RunConfig::parse("radius=abc").is_err());
        assert!(RunConfig::parse("just text").is_err());
    }

    #[test]
    fn hash_ignores_layout() {
        let a = RunConfig::parse("kappa=0,-1\n# note\nradius = 1").unwrap();
        let b = RunConfig::parse("radius=1.0\n\nkappa= 0 , -1.0").unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), RunConfig::parse("kappa=0").unwrap().hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn sha256_known_vector() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
