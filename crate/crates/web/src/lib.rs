//! Browser bindings over the bundled toy grammar and a model trained on the
//! bundled corpus. Every function returns a JSON string.

use std::sync::OnceLock;

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use dsttr::ds::Lexicon;
use dsttr::generate::{GenConfig, GenSession, TraceEvent};
use dsttr::model::{train, ConditionalModel, Normalization};
use dsttr::parser::{parse_utterance, tokenize};
use dsttr::repair::{annotate, RevisionEvent};
use dsttr::toy;
use dsttr::ttr::parse_rt;

struct Engine {
    lexicon: Lexicon,
    model: ConditionalModel,
}

fn engine() -> &'static Engine {
    static ENGINE: OnceLock<Engine> = OnceLock::new();
    ENGINE.get_or_init(|| {
        let lexicon = toy::lexicon();
        let model = train(&toy::corpus(), &lexicon, 0.1, Normalization::PerWord)
            .expect("bundled corpus trains")
            .model;
        Engine { lexicon, model }
    })
}

fn error(msg: impl std::fmt::Display) -> String {
    json!({ "error": msg.to_string() }).to_string()
}

/// The bundled corpus as `{utterance, goal}` pairs.
#[wasm_bindgen]
pub fn examples() -> String {
    let items: Vec<Value> = toy::corpus()
        .iter()
        .map(|e| json!({ "utterance": e.utterance(), "goal": e.goal.to_string() }))
        .collect();
    Value::Array(items).to_string()
}

/// Word-by-word parse: prefix semantics and the context DAG. The toy
/// lexicon is lowercase, so input is lowercased first.
#[wasm_bindgen]
pub fn parse_trace(utterance: &str) -> String {
    let tokens = tokenize(&utterance.to_lowercase());
    match parse_utterance(&tokens, &engine().lexicon) {
        Ok(p) => {
            let steps: Vec<Value> = p
                .prefix_vertices
                .iter()
                .zip(&p.prefix_semantics)
                .enumerate()
                .map(|(i, (&v, rt))| {
                    let vertex = p.dag.vertex(v);
                    json!({
                        "word": if i == 0 { Value::Null } else { json!(tokens[i - 1]) },
                        "semantics": rt.to_string(),
                        "tree": vertex.tree.to_string(),
                        "complete": vertex.is_complete(),
                    })
                })
                .collect();
            json!({
                "grammatical": p.grammatical,
                "steps": steps,
                "dag": p.dag.dump(),
            })
            .to_string()
        }
        Err(e) => error(e),
    }
}

fn run(goal: &str, revision: Option<(usize, &str)>, beam: usize) -> String {
    let e = engine();
    let goal = match parse_rt(goal) {
        Ok(g) => g,
        Err(err) => return error(format!("goal: {err}")),
    };
    let revision = match revision {
        Some((index, text)) => match parse_rt(text) {
            Ok(new_goal) => Some(RevisionEvent { index, new_goal }),
            Err(err) => return error(format!("revised goal: {err}")),
        },
        None => None,
    };
    let mut session = GenSession::new(&e.model, &e.lexicon, goal, GenConfig::with_beam(beam.max(1)));
    let mut pending = revision;
    let result = loop {
        if let Some(r) = &pending {
            if session.spine_len() == r.index || session.is_done() {
                let r = pending.take().expect("checked");
                session.revise(r.new_goal);
            }
        }
        if session.is_done() && pending.is_none() {
            break Ok(());
        }
        if let Err(err) = session.step() {
            break Err(err.to_string());
        }
    };
    let trace: Vec<Value> = session
        .trace()
        .iter()
        .map(|ev| match ev {
            TraceEvent::Beam { position, candidates } => json!({
                "beam": position,
                "candidates": candidates
                    .iter()
                    .map(|c| json!({ "word": c.word, "score": c.score, "verdict": c.verdict.to_string() }))
                    .collect::<Vec<_>>(),
            }),
            TraceEvent::DeadEnd { position, word } => json!({ "dead_end": position, "word": word }),
            TraceEvent::Revision {
                position,
                forward,
                backtracked,
            } => json!({ "revision": position, "forward": forward, "backtracked": backtracked }),
        })
        .collect();
    json!({
        "surface": annotate(session.surface()),
        "clean": session.words().join(" "),
        "repaired_edges": session.repaired_edges(),
        "trace": trace,
        "error": result.err(),
    })
    .to_string()
}

#[wasm_bindgen]
pub fn generate(goal: &str, beam: usize) -> String {
    run(goal, None, beam)
}

/// Generates toward `goal`, switching to `new_goal` once `index` words have
/// been realized.
#[wasm_bindgen]
pub fn generate_with_revision(goal: &str, index: usize, new_goal: &str, beam: usize) -> String {
    run(goal, Some((index, new_goal)), beam)
}
