//! Interactive factorization sessions and their JSON request router.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analysis::{cascade_conditioning, lifting_cond, ConditionReport};
use crate::bank::{builtin_bank, BankJson, Builtin, FilterBank};
use crate::cca::{assemble, coalesce_options, extract_step, terminate, Extraction, Handed, Schema, SchemaStep, StepChoice};
use crate::error::{Error, Result};
use crate::field::FieldContext;
use crate::pmat::{coprimify, normalize_counted, Cascade, CascadeJson, CoprimeOrder, Coprimification, PolyMatrix2};
use crate::poly::{Degree, OpCounter};
use crate::signatures::{is_left_degree_lifting, lifting_signature};

/// `rows_first`, `cols_first`, or `ρ0,ρ1,c0,c1`.
pub fn parse_coprimification(s: &str) -> Result<Coprimification> {
    match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
        "rows_first" | "rows" => Ok(Coprimification::Order(CoprimeOrder::RowsFirst)),
        "cols_first" | "cols" | "columns_first" => Ok(Coprimification::Order(CoprimeOrder::ColsFirst)),
        other => {
            let v: Vec<usize> = other
                .split(',')
                .map(|x| x.trim().parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Invalid(format!("unknown coprimification '{s}'")))?;
            let d: [usize; 4] = v.try_into().map_err(|_| Error::Invalid("explicit coprimification needs four delays".into()))?;
            Ok(Coprimification::Explicit(d))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Applied {
    choice: StepChoice,
    extraction: Extraction,
    before: PolyMatrix2,
    counts_before: OpCounter,
}

#[derive(Clone, Debug, Serialize)]
pub struct Finalized {
    pub cascade: CascadeJson,
    pub display: String,
    pub signature: String,
    pub degree_lifting: bool,
    pub schema: String,
    pub conditioning: ConditionReport,
    pub op_counts: OpCounter,
}

#[derive(Clone, Debug)]
pub struct Session {
    pub id: String,
    pub original: PolyMatrix2,
    pub coprime: [usize; 4],
    pub q: PolyMatrix2,
    history: Vec<Applied>,
    counter: OpCounter,
    finalized: Option<(Cascade, OpCounter)>,
}

impl PartialEq for Session {
    fn eq(&self, o: &Session) -> bool {
        self.original == o.original
            && self.coprime == o.coprime
            && self.q == o.q
            && self.history == o.history
            && self.counter == o.counter
            && self.finalized.as_ref().map(|f| &f.0) == o.finalized.as_ref().map(|f| &f.0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Preview {
    pub filter: String,
    pub chi: u8,
    pub m: usize,
    pub quotient: Vec<Vec<String>>,
    pub quotient_degrees: Vec<Vec<String>>,
    pub cond: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OptionEntry {
    pub step: String,
    pub eta: Handed,
    #[serde(rename = "M")]
    pub ms: Vec<usize>,
    pub delta: u8,
    pub ell: Vec<u8>,
    pub preview: Preview,
}

fn degree_strings(q: &PolyMatrix2) -> Vec<Vec<String>> {
    q.degrees().iter().map(|r| r.iter().map(Degree::to_string).collect()).collect()
}

impl Session {
    pub fn new(id: impl Into<String>, h: PolyMatrix2, how: Coprimification) -> Result<Session> {
        let (coprime, q) = coprimify(&h, how)?;
        Ok(Session {
            id: id.into(),
            original: h,
            coprime,
            q,
            history: Vec::new(),
            counter: OpCounter::new(),
            finalized: None,
        })
    }

    /// The while-loop has ended: the quotient has a zero.
    pub fn terminated(&self) -> bool {
        !self.q.is_zero_free()
    }

    pub fn schema(&self) -> Schema {
        let coprime = if self.coprime == [0; 4] { None } else { Some(self.coprime) };
        Schema { coprime, steps: self.history.iter().map(|a| SchemaStep::from(a.choice)).collect() }
    }

    /// Accumulated factors around `self.q`.
    pub fn factors(&self) -> (Vec<crate::pmat::CascadeFactor>, Vec<crate::pmat::CascadeFactor>) {
        let etas: Vec<Handed> = self.history.iter().map(|a| a.choice.eta).collect();
        let xs: Vec<Extraction> = self.history.iter().map(|a| a.extraction.clone()).collect();
        let marker = crate::pmat::CascadeFactor::Perm(crate::pmat::Perm::I);
        let all = assemble(self.coprime, &etas, &xs, vec![marker.clone()]);
        let k = all.iter().position(|f| *f == marker).expect("marker present");
        (all[..k].to_vec(), all[k + 1..].to_vec())
    }

    /// left·Q·right, which equals the original matrix at every state.
    pub fn reconstruct(&self) -> PolyMatrix2 {
        let ctx = self.q.ctx();
        let (l, r) = self.factors();
        crate::pmat::expand_factors(&l, ctx).mul(&self.q).mul(&crate::pmat::expand_factors(&r, ctx))
    }

    pub fn options(&self) -> Result<Vec<OptionEntry>> {
        if self.terminated() {
            return Ok(Vec::new());
        }
        let d_hat = self.q.det_degree()?;
        let mut out: Vec<(OptionEntry, Extraction)> = Vec::new();
        for eta in [Handed::L, Handed::R] {
            for delta in 0..2u8 {
                for m in 0..=d_hat {
                    for ell in 0..2u8 {
                        let choice = StepChoice::new(eta, m, delta, ell);
                        let Ok(x) = extract_step(&self.q, choice, &mut OpCounter::new()) else { continue };
                        if out.iter().any(|(e, y)| e.eta == eta && e.delta == delta && y.same_step(&x)) {
                            continue;
                        }
                        let group = coalesce_options(&self.q, choice)?;
                        let (chi, filter) = match &x.v {
                            crate::pmat::CascadeFactor::Lift { chi, filter } => (*chi, filter.clone()),
                            _ => unreachable!("extraction yields a lift"),
                        };
                        let preview = Preview {
                            filter: filter.to_string(),
                            chi,
                            m: x.m,
                            quotient: x.quotient.to_strings(),
                            quotient_degrees: degree_strings(&x.quotient),
                            cond: lifting_cond(&filter),
                        };
                        let mut sorted = group.clone();
                        sorted.ms.sort_unstable();
                        sorted.ells.sort_unstable();
                        let entry =
                            OptionEntry { step: sorted.to_string(), eta, ms: group.ms, delta, ell: group.ells, preview };
                        out.push((entry, x));
                    }
                }
            }
        }
        Ok(out.into_iter().map(|(e, _)| e).collect())
    }

    pub fn apply(&mut self, choice: StepChoice) -> Result<()> {
        let n = self.history.len();
        if self.terminated() {
            return Err(Error::Terminated);
        }
        let before = self.counter;
        let x = extract_step(&self.q, choice, &mut self.counter).map_err(|e| {
            self.counter = before;
            Error::IllegalChoice(format!("({choice}): {e}")).at_step(n)
        })?;
        let prev = std::mem::replace(&mut self.q, x.quotient.clone());
        self.history.push(Applied { choice, extraction: x, before: prev, counts_before: before });
        self.finalized = None;
        Ok(())
    }

    pub fn undo(&mut self) -> Result<()> {
        let a = self.history.pop().ok_or(Error::NothingToUndo)?;
        self.q = a.before;
        self.counter = a.counts_before;
        self.finalized = None;
        Ok(())
    }

    pub fn finalize(&mut self) -> Result<Finalized> {
        let n = self.history.len();
        if !self.terminated() {
            return Err(Error::Schema("quotient has no zero; apply more steps".into()).at_step(n));
        }
        let (cascade, counts) = match &self.finalized {
            Some(f) => f.clone(),
            None => {
                let mut counter = self.counter;
                let terminal = terminate(&self.q, &mut counter).map_err(|e| e.at_step(n))?;
                let etas: Vec<Handed> = self.history.iter().map(|a| a.choice.eta).collect();
                let xs: Vec<Extraction> = self.history.iter().map(|a| a.extraction.clone()).collect();
                let c = normalize_counted(&assemble(self.coprime, &etas, &xs, terminal), self.q.ctx(), &mut counter)?;
                self.finalized = Some((c.clone(), counter));
                (c, counter)
            }
        };
        Ok(Finalized {
            cascade: cascade.to_json(),
            display: cascade.display_product(),
            signature: lifting_signature(&cascade).to_string(),
            degree_lifting: is_left_degree_lifting(&cascade),
            schema: self.schema().to_string(),
            conditioning: cascade_conditioning(&cascade),
            op_counts: counts,
        })
    }

    pub fn state_json(&self) -> Value {
        let steps: Vec<Value> = self
            .history
            .iter()
            .map(|a| {
                json!({
                    "eta": a.choice.eta, "M": a.choice.m, "delta": a.choice.delta, "ell": a.choice.ell,
                    "filter": match &a.extraction.v { crate::pmat::CascadeFactor::Lift { filter, .. } => filter.to_string(), _ => String::new() },
                    "m": a.extraction.m,
                })
            })
            .collect();
        let running: f64 = self
            .history
            .iter()
            .map(|a| match &a.extraction.v {
                crate::pmat::CascadeFactor::Lift { filter, .. } => lifting_cond(filter),
                _ => 1.0,
            })
            .product();
        json!({
            "id": self.id,
            "field": self.q.ctx().to_string(),
            "original": self.original.to_strings(),
            "coprimification": self.coprime,
            "quotient": self.q.to_strings(),
            "quotient_degrees": degree_strings(&self.q),
            "det_degree": self.q.det_degree().ok(),
            "steps": steps,
            "schema": self.schema().to_string(),
            "conditioning_product": running,
            "terminated": self.terminated(),
            "finalized": self.finalized.is_some(),
            "op_counts": self.counter,
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum BankSpec {
    Name(String),
    Taps(BankJson),
}

#[derive(Debug, Deserialize)]
struct NewSession {
    bank: Option<BankSpec>,
    matrix: Option<Vec<Vec<String>>>,
    field: Option<String>,
    coprimification: Option<Value>,
}

#[derive(Debug, Deserialize)]
struct StepBody {
    eta: Handed,
    #[serde(rename = "M", alias = "m")]
    m: usize,
    delta: u8,
    ell: u8,
}

fn parse_new(body: &str) -> Result<(PolyMatrix2, Coprimification)> {
    let req: NewSession = serde_json::from_str(body).map_err(|e| Error::Invalid(e.to_string()))?;
    let ctx: FieldContext = match &req.field {
        Some(f) => f.parse()?,
        None => FieldContext::rational(),
    };
    let h = match (req.bank, req.matrix) {
        (Some(BankSpec::Name(n)), None) => builtin_bank(n.parse::<Builtin>()?).to_polyphase(),
        (Some(BankSpec::Taps(j)), None) => FilterBank::from_json(&j, ctx)?.to_polyphase(),
        (None, Some(m)) => PolyMatrix2::from_strings(&m, ctx)?,
        _ => return Err(Error::Invalid("give exactly one of 'bank' or 'matrix'".into())),
    };
    let how = match req.coprimification {
        None | Some(Value::Null) => Coprimification::default(),
        Some(Value::String(s)) => parse_coprimification(&s)?,
        Some(v @ Value::Array(_)) => {
            let d: [usize; 4] = serde_json::from_value(v).map_err(|e| Error::Invalid(e.to_string()))?;
            Coprimification::Explicit(d)
        }
        Some(other) => return Err(Error::Invalid(format!("bad coprimification {other}"))),
    };
    Ok((h, how))
}

/// HTTP-free response: status code and JSON body.
#[derive(Debug, Clone, PartialEq)]
pub struct Response {
    pub status: u16,
    pub body: Value,
}

impl Response {
    fn ok(body: Value) -> Self {
        Response { status: 200, body }
    }

    fn error(e: &Error) -> Self {
        let mut body = json!({ "code": e.code(), "message": e.to_string() });
        if let Some(n) = e.step_index() {
            body["step_index"] = json!(n);
        }
        Response { status: 400, body }
    }

    fn not_found(msg: String) -> Self {
        Response { status: 404, body: json!({ "code": "NotFound", "message": msg }) }
    }
}

/// Session registry; each request holds the lock for its duration, which
/// serializes mutations per session.
#[derive(Default)]
pub struct SessionStore {
    sessions: Mutex<HashMap<String, Session>>,
    next: AtomicU64,
}

impl SessionStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn handle(&self, method: &str, path: &str, body: &str) -> Response {
        let parts: Vec<&str> = path.trim_matches('/').split('/').filter(|s| !s.is_empty()).collect();
        match (method, parts.as_slice()) {
            ("POST", ["session"]) => match parse_new(body) {
                Ok((h, how)) => {
                    let id = format!("s{}", self.next.fetch_add(1, Ordering::Relaxed) + 1);
                    match Session::new(id.clone(), h, how) {
                        Ok(s) => {
                            let state = s.state_json();
                            self.sessions.lock().expect("session lock").insert(id.clone(), s);
                            Response::ok(json!({ "id": id, "state": state }))
                        }
                        Err(e) => Response::error(&e),
                    }
                }
                Err(e) => Response::error(&e),
            },
            (m, ["session", id, action]) => {
                let mut map = self.sessions.lock().expect("session lock");
                let Some(s) = map.get_mut(*id) else {
                    return Response::not_found(format!("no session '{id}'"));
                };
                let result: Result<Value> = match (m, *action) {
                    ("GET", "state") => Ok(s.state_json()),
                    ("GET", "options") => s.options().map(|o| json!({ "options": o, "can_finalize": s.terminated() })),
                    ("POST", "step") => serde_json::from_str::<StepBody>(body)
                        .map_err(|e| Error::Invalid(e.to_string()))
                        .and_then(|b| s.apply(StepChoice::new(b.eta, b.m, b.delta, b.ell)))
                        .map(|_| s.state_json()),
                    ("POST", "undo") => s.undo().map(|_| s.state_json()),
                    ("POST", "finalize") => {
                        s.finalize().map(|f| serde_json::to_value(f).expect("serializable"))
                    }
                    _ => return Response::not_found(format!("no route {m} {path}")),
                };
                match result {
                    Ok(v) => Response::ok(v),
                    Err(e) => Response::error(&e),
                }
            }
            _ => Response::not_found(format!("no route {method} {path}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cca::run_schema;

    fn cdf75() -> PolyMatrix2 {
        builtin_bank(Builtin::Cdf75).to_polyphase()
    }

    #[test]
    fn options_for_fresh_cdf75() {
        let s = Session::new("t", cdf75(), Coprimification::default()).unwrap();
        let o = s.options().unwrap();
        let find = |step: &str| o.iter().find(|e| e.step == step).map(|e| e.preview.filter.clone());
        assert_eq!(find("L,0,0,{0,1}").unwrap(), "-13/4 + 3/4*z^-1");
        assert_eq!(find("L,1,0,{0,1}").unwrap(), "3/4 + 3/4*z^-1");
        assert!(o.iter().all(|e| e.ms.iter().all(|&m| m <= 2)));
    }

    #[test]
    fn replay_matches_batch_and_undo_restores() {
        let schema: Schema = "(L,0,0,0; L,0,1,0; L,0,0,0)".parse().unwrap();
        let mut s = Session::new("t", cdf75(), Coprimification::default()).unwrap();
        let fresh = s.clone();
        for st in &schema.steps {
            s.apply(st.canonical()).unwrap();
            assert_eq!(s.reconstruct(), cdf75());
        }
        let f = s.finalize().unwrap();
        let batch = run_schema(&cdf75(), &schema).unwrap();
        assert_eq!(f.cascade, batch.to_json());
        assert_eq!(f.schema, schema.to_string());
        assert!(matches!(s.apply(StepChoice::new(Handed::L, 0, 0, 0)), Err(Error::Terminated)));
        for _ in 0..3 {
            s.undo().unwrap();
        }
        assert_eq!(s, fresh);
        assert_eq!(s.undo(), Err(Error::NothingToUndo));
    }

    #[test]
    fn identity_session_is_terminated() {
        let s = Session::new("t", PolyMatrix2::identity(FieldContext::rational()), Coprimification::default()).unwrap();
        assert!(s.terminated());
        assert!(s.options().unwrap().is_empty());
    }

    #[test]
    fn router_round_trip() {
        let store = SessionStore::new();
        let r = store.handle("POST", "/session", r#"{"bank":"cdf75"}"#);
        assert_eq!(r.status, 200);
        let id = r.body["id"].as_str().unwrap().to_string();
        let r = store.handle("POST", &format!("/session/{id}/step"), r#"{"eta":"L","M":1,"delta":0,"ell":0}"#);
        assert_eq!(r.status, 200, "{:?}", r.body);
        let r = store.handle("POST", &format!("/session/{id}/step"), r#"{"eta":"L","M":0,"delta":0,"ell":0}"#);
        assert_eq!(r.status, 400);
        assert_eq!(r.body["step_index"], 1);
        let r = store.handle("POST", &format!("/session/{id}/finalize"), "");
        assert_eq!(r.body["code"], "SchemaError");
        assert_eq!(store.handle("GET", "/session/nope/state", "").status, 404);
        assert_eq!(store.handle("POST", "/session", r#"{"bank":"haar"}"#).body["code"], "UnknownName");
    }
}
