use std::fs;

use balanced_lab::HartogsProfile;
use serde::Deserialize;
use serde_json::Value;

/// Settings read from `--config`; command-line flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub profile: Option<ProfileSpec>,
    pub n: Option<usize>,
    pub m: Option<u32>,
    pub m_from: Option<u32>,
    pub m_to: Option<u32>,
    pub m_set: Option<Vec<u32>>,
    pub t_grid: Option<Vec<f64>>,
    pub k_max: Option<u32>,
    pub samples: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub method: Option<String>,
    pub gamma: Option<f64>,
    pub grid: Option<usize>,
    pub h: Option<f64>,
    pub budget: Option<usize>,
    pub at: Option<Vec<String>>,
    pub out: Option<String>,
    pub format: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub builtin: Option<String>,
    pub expr: Option<String>,
    pub x0: Option<Value>,
}

pub fn load_config(path: &str) -> Result<FileConfig, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    serde_json::from_str(&text).map_err(|e| format!("config {path}: {e}"))
}

/// `x0` given as a number or the string `"inf"`.
pub fn parse_x0(text: &str) -> Result<f64, String> {
    match text.trim() {
        "inf" => Ok(f64::INFINITY),
        t => t
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("x0 must be a real number or \"inf\", got {t:?}")),
    }
}

fn x0_from_value(v: &Value) -> Result<f64, String> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| "profile.x0 is not a real number".to_string()),
        Value::String(s) => parse_x0(s).map_err(|e| format!("profile.x0: {e}")),
        other => Err(format!("profile.x0 must be a number or \"inf\", got {other}")),
    }
}

/// Resolves exactly one profile source from flags, falling back to the file.
pub fn resolve_profile(
    builtin: Option<&str>,
    expr: Option<&str>,
    x0: Option<&str>,
    file: Option<&ProfileSpec>,
) -> Result<HartogsProfile, String> {
    let flag_x0 = x0.map(parse_x0).transpose()?;
    let (builtin, expr, x0) = match (builtin, expr) {
        (Some(_), Some(_)) => return Err("give either --profile or --profile-expr, not both".into()),
        (Some(b), None) => (Some(b.to_string()), None, flag_x0),
        (None, Some(e)) => (None, Some(e.to_string()), flag_x0),
        (None, None) => {
            let spec = file.ok_or("no profile given (use --profile, --profile-expr or a config file)")?;
            let file_x0 = spec.x0.as_ref().map(x0_from_value).transpose()?;
            (spec.builtin.clone(), spec.expr.clone(), flag_x0.or(file_x0))
        }
    };
    match (builtin, expr) {
        (Some(_), Some(_)) => Err("profile must have exactly one of \"builtin\" and \"expr\"".into()),
        (Some(name), None) => {
            if x0.is_some() {
                return Err("x0 applies only to expression profiles".into());
            }
            HartogsProfile::builtin(&name).map_err(|e| e.to_string())
        }
        (None, Some(text)) => {
            let x0 = x0.ok_or("expression profiles need x0 (a number or \"inf\")")?;
            HartogsProfile::parse_expression(&text, x0).map_err(|e| e.to_string())
        }
        (None, None) => Err("profile must have exactly one of \"builtin\" and \"expr\"".into()),
    }
}

pub fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, String> {
    text.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| format!("{what}: cannot parse {s:?}")))
        .collect()
}
