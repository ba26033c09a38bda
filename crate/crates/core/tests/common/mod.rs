#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;

use dsttr::ttr::{BaseKind, Field, RecordType, TtrType};

const ENTITIES: [(&str, BaseKind); 5] = [
    ("x", BaseKind::E),
    ("y", BaseKind::E),
    ("z", BaseKind::E),
    ("e", BaseKind::Es),
    ("s", BaseKind::Es),
];
const ATOMS: [&str; 4] = ["john", "mary", "arrive", "see"];
const PREDICATES: [&str; 4] = ["subj", "obj", "red", "today"];

fn kind_of(rt: &[Field], label: &str) -> BaseKind {
    rt.iter().find(|f| f.label.as_str() == label).unwrap().ty.kind()
}

/// A well-formed record type with at most `max_fields` fields and at most
/// two levels of dependency above the independent fields.
pub fn random_rt<R: Rng>(rng: &mut R, max_fields: usize) -> RecordType {
    let mut fields: Vec<Field> = Vec::new();
    let room = |fields: &Vec<Field>| fields.len() < max_fields;
    let n0 = rng.gen_range(1..=4.min(max_fields));
    let mut level0: Vec<&str> = ENTITIES.iter().map(|e| e.0).collect();
    level0.shuffle(rng);
    level0.truncate(n0);
    level0.sort_unstable();
    for l in &level0 {
        let kind = ENTITIES.iter().find(|e| e.0 == *l).unwrap().1;
        fields.push(if rng.gen_bool(0.5) {
            Field::manifest(l, ATOMS.choose(rng).unwrap(), kind)
        } else {
            Field::base(l, kind)
        });
    }
    let mut level1 = Vec::new();
    for l in ["p", "q", "r"] {
        if !room(&fields) || rng.gen_bool(0.4) {
            continue;
        }
        let arity = rng.gen_range(1..=2.min(level0.len()));
        let args: Vec<&str> = level0.choose_multiple(rng, arity).copied().collect();
        fields.push(if rng.gen_bool(0.8) {
            Field::predicate(l, PREDICATES.choose(rng).unwrap(), &args, BaseKind::T)
        } else {
            Field::base(l, BaseKind::T)
        });
        level1.push(l);
    }
    for l in ["c", "d"] {
        if level1.is_empty() || !room(&fields) || rng.gen_bool(0.6) {
            continue;
        }
        let target = *level1.choose(rng).unwrap();
        fields.push(if rng.gen_bool(0.5) {
            Field::predicate(l, "not", &[target], BaseKind::T)
        } else {
            Field::manifest(l, target, BaseKind::T)
        });
    }
    if room(&fields) && rng.gen_bool(0.6) {
        let target = fields.choose(rng).unwrap().label.as_str().to_owned();
        let kind = kind_of(&fields, &target);
        fields.push(Field::manifest("head", &target, kind));
    }
    let rt = RecordType::from_fields(fields);
    assert!(rt.is_wellformed(), "generator produced {rt}");
    rt
}

/// A supertype of `rt`: every field is kept, stripped to its base kind, or
/// dropped; a field is only dropped when nothing kept depends on it.
pub fn weaken<R: Rng>(rng: &mut R, rt: &RecordType) -> RecordType {
    let mut choice: Vec<u8> = rt.fields().iter().map(|_| rng.gen_range(0..3)).collect();
    loop {
        let mut changed = false;
        for (i, f) in rt.fields().iter().enumerate() {
            if choice[i] == 2 {
                continue;
            }
            for d in rt.dependencies_of(f) {
                let j = rt.fields().iter().position(|g| g.label == d).unwrap();
                if choice[j] == 2 {
                    choice[j] = 1;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let fields = rt
        .fields()
        .iter()
        .zip(&choice)
        .filter_map(|(f, c)| match c {
            0 => Some(f.clone()),
            1 => Some(Field::new(f.label.clone(), TtrType::Base(f.ty.kind()))),
            _ => None,
        })
        .collect();
    RecordType::from_fields(fields)
}
