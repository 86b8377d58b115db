use std::fmt::Display;
use std::time::Duration;

use serde_json::{json, Map, Value};

use mvtr_core::MPoly;

pub const RESIDUAL_SHOWN: usize = 5;

#[derive(Clone, Debug)]
pub struct Report {
    pub identity: String,
    pub parameters: Map<String, Value>,
    pub pass: bool,
    /// first few nonzero residual terms
    pub residual_terms: Vec<String>,
    pub residual_count: usize,
    pub wall_time: Duration,
    pub seed_provenance: Vec<(String, String, String)>,
    pub error: Option<String>,
    pub detail: Option<Value>,
}

impl Report {
    pub fn new(identity: impl Into<String>, parameters: Value) -> Self {
        let parameters = match parameters {
            Value::Object(m) => m,
            _ => Map::new(),
        };
        Report {
            identity: identity.into(),
            parameters,
            pass: false,
            residual_terms: Vec::new(),
            residual_count: 0,
            wall_time: Duration::ZERO,
            seed_provenance: Vec::new(),
            error: None,
            detail: None,
        }
    }

    pub fn residual<C: mvtr_core::Ring + Display>(mut self, p: &MPoly<C>) -> Self {
        self.residual_count = p.len();
        let all: Vec<_> = p.terms().collect();
        self.residual_terms = all.iter().rev().take(RESIDUAL_SHOWN).map(|(e, c)| term(e, c)).collect();
        self
    }

    pub fn to_json(&self, timing: bool) -> Value {
        let prov: Vec<Value> =
            self.seed_provenance.iter().map(|(k, v, s)| json!({"key": k, "value": v, "source": s})).collect();
        let mut m = Map::new();
        m.insert("identity".into(), json!(self.identity));
        m.insert("parameters".into(), Value::Object(self.parameters.clone()));
        m.insert("pass".into(), json!(self.pass));
        m.insert("residual_terms".into(), json!(self.residual_terms));
        m.insert("residual_count".into(), json!(self.residual_count));
        m.insert("seed_provenance".into(), Value::Array(prov));
        if timing {
            m.insert("wall_time".into(), json!(self.wall_time.as_secs_f64()));
        }
        if let Some(e) = &self.error {
            m.insert("error".into(), json!(e));
        }
        if let Some(d) = &self.detail {
            m.insert("detail".into(), d.clone());
        }
        Value::Object(m)
    }

    pub fn to_text(&self, timing: bool) -> String {
        let mut s = format!("{} {}", if self.pass { "PASS" } else { "FAIL" }, self.identity);
        if let Some(e) = &self.error {
            s.push_str(&format!("  error: {}", e));
        } else if self.residual_count > 0 {
            s.push_str(&format!("  residual: {} terms, leading {}", self.residual_count, self.residual_terms[0]));
        }
        if timing {
            s.push_str(&format!("  [{:.3}s]", self.wall_time.as_secs_f64()));
        }
        s
    }
}

/// `(c)*t1^2*t3`
pub fn term(e: &[u32], c: &impl Display) -> String {
    let mut s = format!("({})", c);
    for (k, &x) in e.iter().enumerate() {
        match x {
            0 => {}
            1 => s.push_str(&format!("*t{}", k + 1)),
            _ => s.push_str(&format!("*t{}^{}", k + 1, x)),
        }
    }
    s
}
