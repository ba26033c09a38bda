use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::ttr::{Label, RecordType};

use super::lexicon::{LexicalAction, Trigger, Update};
use super::types::{apply_formula, placeholder_argument, Formula, SemType};
use super::DsError;

/// Daughter position. Argument daughters are drawn on the right and functor
/// daughters on the left, by convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Daughter {
    Argument,
    Functor,
}

impl Daughter {
    pub fn as_str(self) -> &'static str {
        match self {
            Daughter::Argument => "argument",
            Daughter::Functor => "functor",
        }
    }
}

/// Path from the root; the root is the empty path.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeAddress(Vec<Daughter>);

impl NodeAddress {
    pub fn root() -> Self {
        NodeAddress(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, d: Daughter) -> NodeAddress {
        let mut p = self.0.clone();
        p.push(d);
        NodeAddress(p)
    }

    pub fn parent(&self) -> Option<NodeAddress> {
        if self.0.is_empty() {
            None
        } else {
            Some(NodeAddress(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn path(&self) -> &[Daughter] {
        &self.0
    }
}

impl fmt::Display for NodeAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        f.write_str("0")?;
        for d in &self.0 {
            f.write_str(match d {
                Daughter::Argument => "0",
                Daughter::Functor => "1",
            })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Node {
    pub ty: Option<SemType>,
    /// Outstanding `?Ty(X)` requirements.
    pub requirements: BTreeSet<SemType>,
    pub formula: Option<Formula>,
    /// The `⟨↓⟩⊥` restriction: this node never gets daughters.
    pub bottom_restricted: bool,
}

impl Node {
    fn requiring(ty: SemType) -> Node {
        Node {
            requirements: [ty].into_iter().collect(),
            ..Node::default()
        }
    }

    pub fn is_complete(&self) -> bool {
        self.requirements.is_empty() && self.ty.is_some() && self.formula.is_some()
    }

    /// `?Ty(X)` for the first outstanding requirement, else `Ty(X)`.
    pub fn type_feature(&self) -> String {
        if let Some(r) = self.requirements.iter().next() {
            format!("?Ty({r})")
        } else if let Some(t) = &self.ty {
            format!("Ty({t})")
        } else {
            "none".to_owned()
        }
    }
}

/// The four computational actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ComputationalAction {
    IntroductionPrediction,
    Completion,
    Anticipation,
    BetaReduce,
}

impl ComputationalAction {
    pub const ALL: [ComputationalAction; 4] = [
        ComputationalAction::IntroductionPrediction,
        ComputationalAction::Completion,
        ComputationalAction::Anticipation,
        ComputationalAction::BetaReduce,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ComputationalAction::IntroductionPrediction => "intro-pred",
            ComputationalAction::Completion => "completion",
            ComputationalAction::Anticipation => "anticipation",
            ComputationalAction::BetaReduce => "beta-reduce",
        }
    }
}

impl fmt::Display for ComputationalAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A partial or complete semantic tree. Trees are values: every action
/// returns a new tree and leaves its input untouched.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DsTree {
    nodes: BTreeMap<NodeAddress, Node>,
    pointer: NodeAddress,
}

impl Default for DsTree {
    fn default() -> Self {
        DsTree::axiom()
    }
}

impl DsTree {
    /// The single-node tree `?Ty(t)` with the pointer at the root.
    pub fn axiom() -> Self {
        let mut nodes = BTreeMap::new();
        nodes.insert(NodeAddress::root(), Node::requiring(SemType::T));
        DsTree {
            nodes,
            pointer: NodeAddress::root(),
        }
    }

    pub fn pointer(&self) -> &NodeAddress {
        &self.pointer
    }

    pub fn node(&self, addr: &NodeAddress) -> Option<&Node> {
        self.nodes.get(addr)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (&NodeAddress, &Node)> {
        self.nodes.iter()
    }

    pub fn pointed(&self) -> &Node {
        &self.nodes[&self.pointer]
    }

    pub fn root(&self) -> &Node {
        &self.nodes[&NodeAddress::root()]
    }

    fn daughter(&self, addr: &NodeAddress, d: Daughter) -> Option<&Node> {
        self.nodes.get(&addr.child(d))
    }

    fn has_daughters(&self, addr: &NodeAddress) -> bool {
        self.daughter(addr, Daughter::Argument).is_some()
            || self.daughter(addr, Daughter::Functor).is_some()
    }

    /// The syntactic conditioning feature: the pointed node's outstanding
    /// requirement or type.
    pub fn pointed_type_feature(&self) -> String {
        self.pointed().type_feature()
    }

    /// No outstanding requirements anywhere, and a typed, decorated root.
    pub fn is_complete(&self) -> bool {
        self.nodes.values().all(|n| n.requirements.is_empty())
            && self.root().ty == Some(SemType::T)
            && self.root().formula.is_some()
    }

    /// Every label carried by any formula in the tree.
    pub fn labels_in_use(&self) -> BTreeSet<Label> {
        self.nodes
            .values()
            .filter_map(|n| n.formula.as_ref())
            .flat_map(|f| f.labels().cloned().collect::<Vec<_>>())
            .collect()
    }

    pub fn apply_computational(&self, action: ComputationalAction) -> Option<DsTree> {
        match action {
            ComputationalAction::IntroductionPrediction => self.introduction_prediction(),
            ComputationalAction::Completion => self.completion(),
            ComputationalAction::Anticipation => self.anticipation(),
            ComputationalAction::BetaReduce => self.beta_reduce(),
        }
    }

    fn introduction_prediction(&self) -> Option<DsTree> {
        let node = self.pointed();
        if !node.requirements.contains(&SemType::T)
            || node.bottom_restricted
            || node.ty.is_some()
            || self.has_daughters(&self.pointer)
        {
            return None;
        }
        let mut out = self.clone();
        let arg = self.pointer.child(Daughter::Argument);
        out.nodes.insert(arg.clone(), Node::requiring(SemType::E));
        out.nodes.insert(
            self.pointer.child(Daughter::Functor),
            Node::requiring(SemType::func(SemType::E, SemType::T)),
        );
        out.pointer = arg;
        Some(out)
    }

    fn completion(&self) -> Option<DsTree> {
        let parent = self.pointer.parent()?;
        if !self.pointed().is_complete() {
            return None;
        }
        let mut out = self.clone();
        out.pointer = parent;
        Some(out)
    }

    fn anticipation(&self) -> Option<DsTree> {
        let target = [Daughter::Functor, Daughter::Argument]
            .into_iter()
            .map(|d| self.pointer.child(d))
            .find(|a| {
                self.nodes
                    .get(a)
                    .is_some_and(|n| !n.requirements.is_empty())
            })?;
        let mut out = self.clone();
        out.pointer = target;
        Some(out)
    }

    fn beta_reduce(&self) -> Option<DsTree> {
        let node = self.pointed();
        if node.formula.is_some() {
            return None;
        }
        let arg = self.daughter(&self.pointer, Daughter::Argument)?;
        let fun = self.daughter(&self.pointer, Daughter::Functor)?;
        if !arg.is_complete() || !fun.is_complete() {
            return None;
        }
        let SemType::Function(domain, range) = fun.ty.as_ref()? else {
            return None;
        };
        if arg.ty.as_ref() != Some(&**domain) {
            return None;
        }
        if node.ty.as_ref().is_some_and(|t| t != &**range) {
            return None;
        }
        let arg_rt = arg.formula.as_ref()?.as_rt()?;
        let result = apply_formula(fun.formula.as_ref()?, arg_rt).ok()?;
        let mut out = self.clone();
        let n = out.nodes.get_mut(&self.pointer).expect("pointer is valid");
        n.requirements.remove(range);
        n.ty = Some((**range).clone());
        n.formula = Some(result);
        Some(out)
    }

    /// Runs a lexical action. `Ok(None)` means the action is inapplicable
    /// here; no partially updated tree is ever returned.
    pub fn apply_lexical(&self, action: &LexicalAction) -> Result<Option<DsTree>, DsError> {
        let node = self.pointed();
        let triggered = match &action.trigger {
            Trigger::Requirement(t) => node.requirements.contains(t),
            Trigger::Type(t) => node.ty.as_ref() == Some(t),
        };
        if !triggered {
            return Ok(None);
        }
        let in_use = self.labels_in_use();
        let mut out = self.clone();
        for update in &action.updates {
            let fault = |msg: &str| DsError::GrammarFault {
                action: action.name(),
                msg: msg.to_owned(),
            };
            let ptr = out.pointer.clone();
            match update {
                Update::PutType(t) => {
                    let n = out.nodes.get_mut(&ptr).expect("pointer is valid");
                    match &n.ty {
                        Some(existing) if existing != t => return Ok(None),
                        _ => {}
                    }
                    n.ty = Some(t.clone());
                    n.requirements.remove(t);
                }
                Update::PutRequirement(t) => {
                    let n = out.nodes.get_mut(&ptr).expect("pointer is valid");
                    if n.ty.as_ref() != Some(t) {
                        n.requirements.insert(t.clone());
                    }
                }
                Update::PutFormula(f) => {
                    let has_daughters = out.has_daughters(&ptr);
                    let n = out.nodes.get_mut(&ptr).expect("pointer is valid");
                    match (&n.formula, f) {
                        (None, _) if has_daughters => return Ok(None),
                        (None, f) => n.formula = Some(f.freshened(&in_use)),
                        (Some(Formula::Rt(existing)), Formula::Rt(extra)) => {
                            // extending existing content: labels are anaphoric
                            match existing.meet(extra) {
                                Ok(m) if m.is_wellformed() => n.formula = Some(Formula::Rt(m)),
                                _ => return Ok(None),
                            }
                        }
                        _ => return Ok(None),
                    }
                }
                Update::Bottom => {
                    if out.has_daughters(&ptr) {
                        return Err(fault("bottom restriction on a node with daughters"));
                    }
                    out.nodes.get_mut(&ptr).expect("pointer is valid").bottom_restricted = true;
                }
                Update::Make(d) => {
                    if out.nodes[&ptr].bottom_restricted {
                        return Err(fault("cannot build a daughter under a bottom-restricted node"));
                    }
                    let addr = ptr.child(*d);
                    if out.nodes.contains_key(&addr) {
                        return Ok(None);
                    }
                    out.nodes.insert(addr, Node::default());
                }
                Update::Go(Some(d)) => {
                    let addr = ptr.child(*d);
                    if !out.nodes.contains_key(&addr) {
                        return Err(fault(&format!("no {} daughter to move to", d.as_str())));
                    }
                    out.pointer = addr;
                }
                Update::Go(None) => {
                    out.pointer = ptr
                        .parent()
                        .ok_or_else(|| fault("cannot move above the root"))?;
                }
            }
        }
        Ok(Some(out))
    }

    /// The maximal content of a subtree: its own formula if it has one, else
    /// its functor applied to its argument (or to a placeholder when the
    /// argument is not yet built up), else whatever its argument holds.
    fn content(&self, addr: &NodeAddress) -> Option<Formula> {
        let node = self.nodes.get(addr)?;
        if let Some(f) = &node.formula {
            return Some(f.clone());
        }
        let fun = self.content(&addr.child(Daughter::Functor));
        let arg = self.content(&addr.child(Daughter::Argument));
        match (fun, arg) {
            (Some(f @ Formula::Abstract { .. }), arg) => {
                let arg_rt = match arg {
                    Some(Formula::Rt(r)) if r.head().is_some() => r,
                    _ => placeholder_argument(),
                };
                apply_formula(&f, &arg_rt)
                    .or_else(|_| apply_formula(&f, &placeholder_argument()))
                    .ok()
            }
            (_, arg) => arg,
        }
    }

    /// The maximal record type derivable from the tree as it stands.
    pub fn root_semantics(&self) -> RecordType {
        match self.content(&NodeAddress::root()) {
            Some(Formula::Rt(r)) => r,
            _ => RecordType::empty(),
        }
    }
}

impl fmt::Display for DsTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (addr, n) in &self.nodes {
            let mut decor = Vec::new();
            for r in &n.requirements {
                decor.push(format!("?Ty({r})"));
            }
            if let Some(t) = &n.ty {
                decor.push(format!("Ty({t})"));
            }
            if n.bottom_restricted {
                decor.push("⟨↓⟩⊥".to_owned());
            }
            if let Some(fo) = &n.formula {
                decor.push(fo.to_string());
            }
            if *addr == self.pointer {
                decor.push("◇".to_owned());
            }
            writeln!(f, "{addr}: {}", decor.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ds::Lexicon;
    use crate::ttr::parse_rt;

    fn toy() -> Lexicon {
        crate::toy::lexicon()
    }

    fn lex(tree: &DsTree, lexicon: &Lexicon, word: &str) -> Option<DsTree> {
        lexicon
            .actions(word)
            .iter()
            .find_map(|a| tree.apply_lexical(a).unwrap())
    }

    #[test]
    fn axiom_tree() {
        let t = DsTree::axiom();
        assert_eq!(t.root().requirements, [SemType::T].into_iter().collect());
        assert!(!t.is_complete());
        assert_eq!(t.root_semantics(), RecordType::empty());
        assert!(t.apply_computational(ComputationalAction::Completion).is_none());
    }

    #[test]
    fn intro_pred_builds_two_daughters() {
        let t = DsTree::axiom()
            .apply_computational(ComputationalAction::IntroductionPrediction)
            .unwrap();
        assert_eq!(t.pointed_type_feature(), "?Ty(e)");
        let f = t.node(&NodeAddress::root().child(Daughter::Functor)).unwrap();
        assert_eq!(f.type_feature(), "?Ty(e→t)");
    }

    #[test]
    fn john_arrives_by_hand() {
        let lexicon = toy();
        let axiom = DsTree::axiom();
        assert!(lex(&axiom, &lexicon, "john").is_none(), "trigger mismatch");
        let t1 = axiom
            .apply_computational(ComputationalAction::IntroductionPrediction)
            .unwrap();
        let t2 = lex(&t1, &lexicon, "john").unwrap();
        let john = t2.pointed();
        assert_eq!(john.ty, Some(SemType::E));
        assert!(john.bottom_restricted);
        assert_eq!(t2.root_semantics(), parse_rt("[x=john:e, head=x:e]").unwrap());
        assert!(!t2.is_complete());

        let t3 = t2
            .apply_computational(ComputationalAction::Completion)
            .unwrap()
            .apply_computational(ComputationalAction::Anticipation)
            .unwrap();
        assert_eq!(t3.pointed_type_feature(), "?Ty(e→t)");
        let t4 = lex(&t3, &lexicon, "arrives").unwrap();
        assert_eq!(t4.pointed().ty, Some(SemType::func(SemType::E, SemType::T)));
        let t5 = t4
            .apply_computational(ComputationalAction::Completion)
            .unwrap()
            .apply_computational(ComputationalAction::BetaReduce)
            .unwrap();
        let fig1 = parse_rt("[x=john:e, e=arrive:es, p=subj(e,x):t, head=p:t]").unwrap();
        assert!(t5.is_complete());
        assert_eq!(t5.root().ty, Some(SemType::T));
        assert_eq!(t5.root().formula, Some(Formula::Rt(fig1.clone())));
        // partial composition already yields the same content before reduction
        assert_eq!(t4.root_semantics(), fig1);
    }

    #[test]
    fn actions_do_not_mutate_input() {
        let lexicon = toy();
        let t = DsTree::axiom()
            .apply_computational(ComputationalAction::IntroductionPrediction)
            .unwrap();
        let before = t.clone();
        let _ = lex(&t, &lexicon, "john");
        let _ = t.apply_computational(ComputationalAction::Anticipation);
        assert_eq!(t, before);
    }

    #[test]
    fn bottom_restriction_is_a_grammar_fault() {
        let bad = crate::ds::load_grammar(
            "word oops : trigger=?Ty(e) ; put Ty(e) ; bottom ; make argument",
        )
        .unwrap();
        let t = DsTree::axiom()
            .apply_computational(ComputationalAction::IntroductionPrediction)
            .unwrap();
        let err = t.apply_lexical(&bad.actions("oops")[0]).unwrap_err();
        assert!(matches!(err, DsError::GrammarFault { .. }));
    }
}
