//! JSON scenario files and negotiation traces.
//!
//! A scenario file looks like
//!
//! ```json
//! {"agents":["1","2"],"resources":["r1","r2"],
//!  "utilities":{"1":{"type":"explicit","values":{"":"0","r1":"2","r2":"3","r1,r2":"7"}},
//!               "2":{"type":"additive","values":{"r1":"3","r2":"3"}}},
//!  "initial_allocation":{"1":["r1","r2"],"2":[]}}
//! ```
//!
//! Bundle keys are resource ids sorted lexicographically and joined with
//! commas; `""` is the empty bundle. Values are integers, `p/q` fractions or
//! exact decimals, as strings or JSON numbers.

use negotiate_core::{
    validate_allocation, Allocation, Bundle, NegotiationTrace, PaymentFunction, Rational, Scenario,
    UtilityFunction, WelfareSnapshot,
};
use serde_json::{json, Map, Value};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FormatError {
    #[error("syntax error: {0}")]
    SyntaxError(String),
    #[error("explicit utility table of agent {agent} has no value for bundle {{{bundle}}}")]
    NonTotalExplicitTable { agent: String, bundle: String },
    #[error("additive utility table of agent {agent} has no value for resource {resource}")]
    NonTotalAdditiveTable { agent: String, resource: String },
    #[error("unknown resource {resource:?} in bundle key {key:?} of agent {agent}")]
    UnknownResourceInBundleKey { agent: String, key: String, resource: String },
    #[error("invalid initial allocation: {0}")]
    InvalidAllocation(negotiate_core::Error),
    #[error("invalid scenario: {0}")]
    InvalidScenario(negotiate_core::Error),
}

fn syntax(msg: impl Into<String>) -> FormatError {
    FormatError::SyntaxError(msg.into())
}

/// Resource names of a bundle, lexicographically sorted and comma-joined.
pub fn bundle_key(scenario: &Scenario, bundle: Bundle) -> String {
    let mut names: Vec<&str> = bundle.resources().map(|r| scenario.resources()[r].as_str()).collect();
    names.sort_unstable();
    names.join(",")
}

fn bundle_names(scenario: &Scenario, bundle: Bundle) -> Vec<Value> {
    bundle.resources().map(|r| Value::from(scenario.resources()[r].as_str())).collect()
}

fn rational_value(v: &Value, what: &str) -> Result<Rational, FormatError> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(syntax(format!("{what}: expected a number or numeric string"))),
    };
    text.parse().map_err(|e| syntax(format!("{what}: {e}")))
}

fn string_list(v: Option<&Value>, field: &str) -> Result<Vec<String>, FormatError> {
    let arr = v
        .and_then(Value::as_array)
        .ok_or_else(|| syntax(format!("field {field:?} must be an array of strings")))?;
    arr.iter()
        .map(|x| x.as_str().map(str::to_owned).ok_or_else(|| syntax(format!("field {field:?} must contain strings"))))
        .collect()
}

fn parse_utility(
    agent: &str,
    spec: &Value,
    resources: &[String],
) -> Result<UtilityFunction, FormatError> {
    let obj = spec.as_object().ok_or_else(|| syntax(format!("utility of agent {agent} must be an object")))?;
    let kind = obj
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| syntax(format!("utility of agent {agent} needs a string \"type\"")))?;
    let values = obj
        .get("values")
        .and_then(Value::as_object)
        .ok_or_else(|| syntax(format!("utility of agent {agent} needs a \"values\" object")))?;
    let index = |key: &str, name: &str| {
        resources.iter().position(|r| r == name).ok_or_else(|| FormatError::UnknownResourceInBundleKey {
            agent: agent.into(),
            key: key.into(),
            resource: name.into(),
        })
    };
    let m = resources.len();
    match kind {
        "explicit" => {
            if m > negotiate_core::scenario::MAX_EXPLICIT_RESOURCES {
                return Err(FormatError::InvalidScenario(negotiate_core::Error::TooManyResources {
                    got: m,
                    limit: negotiate_core::scenario::MAX_EXPLICIT_RESOURCES,
                }));
            }
            let mut table: Vec<Option<Rational>> = vec![None; 1 << m];
            for (key, v) in values {
                let mut bits = 0u32;
                if !key.is_empty() {
                    for name in key.split(',') {
                        let r = index(key, name)?;
                        if bits & (1 << r) != 0 {
                            return Err(syntax(format!("agent {agent}: resource {name} repeated in key {key:?}")));
                        }
                        bits |= 1 << r;
                    }
                }
                let slot = &mut table[bits as usize];
                if slot.is_some() {
                    return Err(syntax(format!("agent {agent}: bundle key {key:?} given twice")));
                }
                *slot = Some(rational_value(v, &format!("agent {agent}, bundle {key:?}"))?);
            }
            table
                .into_iter()
                .enumerate()
                .map(|(bits, v)| {
                    v.ok_or_else(|| {
                        let mut names: Vec<&str> =
                            Bundle::from_bits(bits as u32).resources().map(|r| resources[r].as_str()).collect();
                        names.sort_unstable();
                        FormatError::NonTotalExplicitTable { agent: agent.into(), bundle: names.join(",") }
                    })
                })
                .collect::<Result<Vec<_>, _>>()
                .map(UtilityFunction::Explicit)
        }
        "additive" => {
            let mut table: Vec<Option<Rational>> = vec![None; m];
            for (key, v) in values {
                let r = index(key, key)?;
                table[r] = Some(rational_value(v, &format!("agent {agent}, resource {key:?}"))?);
            }
            table
                .into_iter()
                .enumerate()
                .map(|(r, v)| {
                    v.ok_or_else(|| FormatError::NonTotalAdditiveTable {
                        agent: agent.into(),
                        resource: resources[r].clone(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()
                .map(UtilityFunction::Additive)
        }
        other => Err(syntax(format!("agent {agent}: unknown utility type {other:?}"))),
    }
}

/// Parses a scenario file and its optional initial allocation.
pub fn parse_scenario(text: &str) -> Result<(Scenario, Option<Allocation>), FormatError> {
    let root: Value = serde_json::from_str(text).map_err(|e| syntax(e.to_string()))?;
    let obj = root.as_object().ok_or_else(|| syntax("top level must be an object"))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "agents" | "resources" | "utilities" | "initial_allocation") {
            return Err(syntax(format!("unknown field {key:?}")));
        }
    }
    let agents = string_list(obj.get("agents"), "agents")?;
    let resources = string_list(obj.get("resources"), "resources")?;
    let utils = obj
        .get("utilities")
        .and_then(Value::as_object)
        .ok_or_else(|| syntax("field \"utilities\" must be an object"))?;
    for name in utils.keys() {
        if !agents.contains(name) {
            return Err(syntax(format!("utility given for unknown agent {name:?}")));
        }
    }
    let utilities = agents
        .iter()
        .map(|a| {
            let spec = utils.get(a).ok_or_else(|| syntax(format!("no utility function for agent {a:?}")))?;
            parse_utility(a, spec, &resources)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let scenario = Scenario::new(agents, resources, utilities).map_err(FormatError::InvalidScenario)?;

    let initial = match obj.get("initial_allocation") {
        None | Some(Value::Null) => None,
        Some(v) => Some(parse_allocation_value(&scenario, v)?),
    };
    Ok((scenario, initial))
}

fn parse_allocation_value(scenario: &Scenario, v: &Value) -> Result<Allocation, FormatError> {
    let obj = v.as_object().ok_or_else(|| syntax("allocation must be an object"))?;
    let entries = obj
        .iter()
        .map(|(agent, list)| Ok((agent.clone(), string_list(Some(list), agent)?)))
        .collect::<Result<Vec<_>, FormatError>>()?;
    validate_allocation(scenario, &entries).map_err(FormatError::InvalidAllocation)
}

/// Reads an allocation object such as `{"1":["r1"],"2":["r2"]}`.
pub fn parse_allocation(scenario: &Scenario, text: &str) -> Result<Allocation, FormatError> {
    let v: Value = serde_json::from_str(text).map_err(|e| syntax(e.to_string()))?;
    parse_allocation_value(scenario, &v)
}

pub fn allocation_json(scenario: &Scenario, alloc: &Allocation) -> Value {
    let mut map = Map::new();
    for (i, name) in scenario.agents().iter().enumerate() {
        map.insert(name.clone(), Value::Array(bundle_names(scenario, alloc.bundle(i))));
    }
    Value::Object(map)
}

pub fn scenario_json(scenario: &Scenario, initial: Option<&Allocation>) -> Value {
    let mut utilities = Map::new();
    for (i, name) in scenario.agents().iter().enumerate() {
        let u = match &scenario.utilities()[i] {
            UtilityFunction::Explicit(table) => {
                let values: Map<String, Value> = table
                    .iter()
                    .enumerate()
                    .map(|(bits, v)| (bundle_key(scenario, Bundle::from_bits(bits as u32)), Value::from(v.to_string())))
                    .collect();
                json!({"type": "explicit", "values": values})
            }
            UtilityFunction::Additive(per_resource) => {
                let values: Map<String, Value> = scenario
                    .resources()
                    .iter()
                    .zip(per_resource)
                    .map(|(r, v)| (r.clone(), Value::from(v.to_string())))
                    .collect();
                json!({"type": "additive", "values": values})
            }
        };
        utilities.insert(name.clone(), u);
    }
    let mut root = Map::new();
    root.insert("agents".into(), json!(scenario.agents()));
    root.insert("resources".into(), json!(scenario.resources()));
    root.insert("utilities".into(), Value::Object(utilities));
    if let Some(a) = initial {
        root.insert("initial_allocation".into(), allocation_json(scenario, a));
    }
    Value::Object(root)
}

pub fn serialize_scenario(scenario: &Scenario, initial: Option<&Allocation>) -> String {
    let mut s = serde_json::to_string_pretty(&scenario_json(scenario, initial)).expect("serializable");
    s.push('\n');
    s
}

pub fn welfare_json(scenario: &Scenario, w: &WelfareSnapshot) -> Value {
    let per_agent: Map<String, Value> = scenario
        .agents()
        .iter()
        .zip(&w.per_agent)
        .map(|(a, v)| (a.clone(), Value::from(v.to_string())))
        .collect();
    json!({
        "utilitarian": w.utilitarian.to_string(),
        "egalitarian": w.egalitarian.to_string(),
        "elitist": w.elitist.to_string(),
        "ordered": w.ordered.to_string(),
        "per_agent": per_agent,
    })
}

fn payment_json(scenario: &Scenario, p: &PaymentFunction) -> Value {
    let map: Map<String, Value> = scenario
        .agents()
        .iter()
        .zip(p.payments())
        .map(|(a, v)| (a.clone(), Value::from(v.to_string())))
        .collect();
    Value::Object(map)
}

/// Run metadata recorded next to the steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceHeader {
    pub criterion: String,
    pub filter: String,
    pub policy: String,
    pub seed: u64,
    pub step_cap: Option<usize>,
}

pub fn trace_json(scenario: &Scenario, header: Option<&TraceHeader>, trace: &NegotiationTrace) -> Value {
    let steps: Vec<Value> = trace
        .steps
        .iter()
        .map(|st| {
            let involved: Vec<Value> = st
                .deal
                .involved_agents()
                .into_iter()
                .map(|i| Value::from(scenario.agents()[i].as_str()))
                .collect();
            json!({
                "involved_agents": involved,
                "moved_resources": bundle_names(scenario, st.deal.moved_resources()),
                "after": allocation_json(scenario, st.deal.after()),
                "payment": st.payment.as_ref().map(|p| payment_json(scenario, p)),
                "welfare": welfare_json(scenario, &st.welfare),
            })
        })
        .collect();
    let mut root = Map::new();
    if let Some(h) = header {
        root.insert("criterion".into(), Value::from(h.criterion.as_str()));
        root.insert("filter".into(), Value::from(h.filter.as_str()));
        root.insert("policy".into(), Value::from(h.policy.as_str()));
        root.insert("seed".into(), Value::from(h.seed));
        root.insert("step_cap".into(), h.step_cap.map_or(Value::Null, Value::from));
    }
    root.insert("initial".into(), allocation_json(scenario, &trace.initial));
    root.insert("initial_welfare".into(), welfare_json(scenario, &trace.initial_welfare));
    root.insert("steps".into(), Value::Array(steps));
    root.insert("terminal".into(), allocation_json(scenario, &trace.terminal));
    root.insert("terminal_welfare".into(), welfare_json(scenario, trace.terminal_welfare()));
    root.insert("termination".into(), Value::from(trace.termination.to_string()));
    Value::Object(root)
}

pub fn serialize_trace(scenario: &Scenario, header: Option<&TraceHeader>, trace: &NegotiationTrace) -> String {
    let mut s = serde_json::to_string_pretty(&trace_json(scenario, header, trace)).expect("serializable");
    s.push('\n');
    s
}
