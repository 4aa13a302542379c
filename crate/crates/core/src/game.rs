//! Extensive-form game model: nodes, information sets, validation and rerooting.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use crate::prob::Prob;

pub type NodeId = usize;
pub type InfosetId = usize;
pub type PlayerIndex = usize;

/// Tolerance used when comparing payoffs structurally.
pub const PAYOFF_EQ_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Player {
    pub index: usize,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    Decision { player: usize, infoset: InfosetId },
    Chance { probs: Vec<Prob> },
    Terminal { outcome: String, payoffs: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub label: String,
    pub child: NodeId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    /// Free-form label; empty when the source gave none.
    pub name: String,
    pub kind: NodeKind,
    pub children: Vec<Edge>,
    pub parent: Option<NodeId>,
}

impl Node {
    pub fn is_terminal(&self) -> bool {
        matches!(self.kind, NodeKind::Terminal { .. })
    }

    pub fn is_chance(&self) -> bool {
        matches!(self.kind, NodeKind::Chance { .. })
    }

    pub fn is_decision(&self) -> bool {
        matches!(self.kind, NodeKind::Decision { .. })
    }

    pub fn infoset(&self) -> Option<InfosetId> {
        match self.kind {
            NodeKind::Decision { infoset, .. } => Some(infoset),
            _ => None,
        }
    }

    pub fn payoffs(&self) -> Option<&[f64]> {
        match &self.kind {
            NodeKind::Terminal { payoffs, .. } => Some(payoffs),
            _ => None,
        }
    }

    /// Index of the child edge carrying `label`, if exactly one does.
    pub fn child_by_label(&self, label: &str) -> Option<usize> {
        let mut found = None;
        for (i, e) in self.children.iter().enumerate() {
            if e.label == label {
                if found.is_some() {
                    return None;
                }
                found = Some(i);
            }
        }
        found
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Infoset {
    pub id: InfosetId,
    pub owner: usize,
    pub name: String,
    /// Member nodes in pre-order.
    pub members: Vec<NodeId>,
    pub actions: Vec<String>,
}

/// An extensive-form game. Immutable once built; share freely across threads.
#[derive(Debug, Clone)]
pub struct Game {
    title: String,
    comment: Option<String>,
    players: Vec<Player>,
    nodes: Vec<Node>,
    root: NodeId,
    infosets: Vec<Infoset>,
    order: Vec<NodeId>,
    chance_weights: Vec<Vec<f64>>,
    annotations: Option<serde_json::Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Issue {
    NoPlayers,
    DuplicatePlayerName { name: String },
    DuplicateNodeId { node: NodeId },
    UnknownNode { node: NodeId },
    OrphanNode { node: NodeId },
    Cycle { node: NodeId },
    ParentMismatch { node: NodeId },
    TerminalWithChildren { node: NodeId },
    MissingChildren { node: NodeId },
    ChanceArity { node: NodeId },
    NegativeChanceProb { node: NodeId },
    ChanceProbsNotNormalized { node: NodeId },
    PayoffLength { node: NodeId, expected: usize, found: usize },
    NonFinitePayoff { node: NodeId },
    UnknownPlayer { node: NodeId },
    UnknownInfoset { node: NodeId },
    EmptyInfoset { infoset: InfosetId },
    InfosetOwnerMismatch { infoset: InfosetId, node: NodeId },
    InfosetShapeMismatch { infoset: InfosetId, node: NodeId },
    InfosetPartition { node: NodeId },
    ImperfectRecall { infoset: InfosetId },
}

impl Issue {
    pub fn severity(&self) -> Severity {
        match self {
            Issue::ImperfectRecall { .. } => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::NoPlayers => write!(f, "game has no players"),
            Issue::DuplicatePlayerName { name } => write!(f, "duplicate player name `{name}`"),
            Issue::DuplicateNodeId { node } => write!(f, "node {node}: duplicate node id"),
            Issue::UnknownNode { node } => write!(f, "reference to unknown node {node}"),
            Issue::OrphanNode { node } => write!(f, "node {node} is not reachable from the root"),
            Issue::Cycle { node } => write!(f, "node {node} is reached twice (cycle or shared child)"),
            Issue::ParentMismatch { node } => write!(f, "node {node}: parent link disagrees with tree"),
            Issue::TerminalWithChildren { node } => write!(f, "terminal node {node} has children"),
            Issue::MissingChildren { node } => write!(f, "non-terminal node {node} has no children"),
            Issue::ChanceArity { node } => {
                write!(f, "chance node {node}: probability count differs from branch count")
            }
            Issue::NegativeChanceProb { node } => write!(f, "chance node {node}: negative probability"),
            Issue::ChanceProbsNotNormalized { node } => {
                write!(f, "chance node {node}: probabilities do not sum to 1")
            }
            Issue::PayoffLength { node, expected, found } => {
                write!(f, "terminal node {node}: {found} payoffs for {expected} players")
            }
            Issue::NonFinitePayoff { node } => write!(f, "terminal node {node}: non-finite payoff"),
            Issue::UnknownPlayer { node } => write!(f, "decision node {node}: unknown player"),
            Issue::UnknownInfoset { node } => write!(f, "decision node {node}: unknown infoset"),
            Issue::EmptyInfoset { infoset } => write!(f, "infoset {infoset} has no members"),
            Issue::InfosetOwnerMismatch { infoset, node } => {
                write!(f, "infoset {infoset}: member {node} belongs to a different player")
            }
            Issue::InfosetShapeMismatch { infoset, node } => {
                write!(f, "infoset {infoset}: member {node} has different actions")
            }
            Issue::InfosetPartition { node } => {
                write!(f, "decision node {node} is not listed exactly once in its infoset")
            }
            Issue::ImperfectRecall { infoset } => {
                write!(f, "infoset {infoset}: members have different own-move histories (imperfect recall)")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub issue: Issue,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}", self.issue)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GameError {
    #[error("invalid game: {}", join_errors(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
}

fn join_errors(d: &[Diagnostic]) -> String {
    d.iter()
        .filter(|d| d.severity == Severity::Error)
        .map(|d| d.issue.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl GameError {
    /// Error-severity issues carried by an `Invalid` error.
    pub fn issues(&self) -> Vec<&Issue> {
        match self {
            GameError::Invalid(d) => d
                .iter()
                .filter(|d| d.severity == Severity::Error)
                .map(|d| &d.issue)
                .collect(),
            GameError::UnknownNode(_) => Vec::new(),
        }
    }
}

/// Nested description of a game, the input to [`build_game`].
#[derive(Debug, Clone, PartialEq)]
pub struct GameSpec {
    pub title: String,
    pub comment: Option<String>,
    pub players: Vec<String>,
    pub root: NodeSpec,
    pub annotations: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeSpec {
    Terminal {
        name: String,
        outcome: String,
        payoffs: Vec<f64>,
    },
    Chance {
        name: String,
        branches: Vec<(String, Prob, NodeSpec)>,
    },
    /// Decisions sharing an `infoset` key form one information set.
    Decision {
        name: String,
        player: usize,
        infoset: String,
        infoset_name: Option<String>,
        actions: Vec<(String, NodeSpec)>,
    },
}

impl NodeSpec {
    pub fn terminal(payoffs: impl Into<Vec<f64>>) -> Self {
        NodeSpec::Terminal { name: String::new(), outcome: String::new(), payoffs: payoffs.into() }
    }

    pub fn chance<L: Into<String>>(branches: impl IntoIterator<Item = (L, Prob, NodeSpec)>) -> Self {
        NodeSpec::Chance {
            name: String::new(),
            branches: branches.into_iter().map(|(l, p, c)| (l.into(), p, c)).collect(),
        }
    }

    pub fn decision<L: Into<String>>(
        player: usize,
        infoset: impl Into<String>,
        actions: impl IntoIterator<Item = (L, NodeSpec)>,
    ) -> Self {
        NodeSpec::Decision {
            name: String::new(),
            player,
            infoset: infoset.into(),
            infoset_name: None,
            actions: actions.into_iter().map(|(l, c)| (l.into(), c)).collect(),
        }
    }

    pub fn named(mut self, new_name: impl Into<String>) -> Self {
        match &mut self {
            NodeSpec::Terminal { name, .. }
            | NodeSpec::Chance { name, .. }
            | NodeSpec::Decision { name, .. } => *name = new_name.into(),
        }
        self
    }

    /// Sets the outcome name of a terminal; no effect on other kinds.
    pub fn outcome(mut self, new_outcome: impl Into<String>) -> Self {
        if let NodeSpec::Terminal { outcome, .. } = &mut self {
            *outcome = new_outcome.into();
        }
        self
    }
}

/// Builds and validates a game from a nested description. Node ids are
/// assigned in depth-first pre-order; infoset ids in order of first
/// appearance.
pub fn build_game(spec: GameSpec) -> Result<Game, GameError> {
    struct Builder {
        nodes: Vec<Node>,
        infosets: Vec<Infoset>,
        keys: HashMap<String, InfosetId>,
    }

    impl Builder {
        fn add(&mut self, spec: NodeSpec, parent: Option<NodeId>) -> NodeId {
            let id = self.nodes.len();
            let (name, kind, kids): (String, NodeKind, Vec<(String, NodeSpec)>) = match spec {
                NodeSpec::Terminal { name, outcome, payoffs } => {
                    (name, NodeKind::Terminal { outcome, payoffs }, Vec::new())
                }
                NodeSpec::Chance { name, branches } => {
                    let mut probs = Vec::with_capacity(branches.len());
                    let mut kids = Vec::with_capacity(branches.len());
                    for (label, p, child) in branches {
                        probs.push(p);
                        kids.push((label, child));
                    }
                    (name, NodeKind::Chance { probs }, kids)
                }
                NodeSpec::Decision { name, player, infoset, infoset_name, actions } => {
                    let labels: Vec<String> = actions.iter().map(|(l, _)| l.clone()).collect();
                    let next = self.infosets.len();
                    let iset = *self.keys.entry(infoset.clone()).or_insert(next);
                    if iset == next {
                        self.infosets.push(Infoset {
                            id: iset,
                            owner: player,
                            name: infoset_name.unwrap_or(infoset),
                            members: Vec::new(),
                            actions: labels,
                        });
                    }
                    self.infosets[iset].members.push(id);
                    (name, NodeKind::Decision { player, infoset: iset }, actions)
                }
            };
            self.nodes.push(Node { id, name, kind, children: Vec::new(), parent });
            for (label, child) in kids {
                let cid = self.add(child, Some(id));
                self.nodes[id].children.push(Edge { label, child: cid });
            }
            id
        }
    }

    let mut b = Builder { nodes: Vec::new(), infosets: Vec::new(), keys: HashMap::new() };
    b.add(spec.root, None);
    let players = spec
        .players
        .into_iter()
        .enumerate()
        .map(|(index, name)| Player { index, name })
        .collect();
    let game = Game::from_parts(spec.title, players, b.nodes, 0, b.infosets)
        .with_comment(spec.comment)
        .with_annotations(spec.annotations);
    let diags = validate(&game);
    if diags.iter().any(|d| d.severity == Severity::Error) {
        return Err(GameError::Invalid(diags));
    }
    Ok(game)
}

impl Game {
    /// Assembles a game from raw parts without validation. Run [`validate`]
    /// before handing the result to evaluation code.
    pub fn from_parts(
        title: impl Into<String>,
        players: Vec<Player>,
        nodes: Vec<Node>,
        root: NodeId,
        infosets: Vec<Infoset>,
    ) -> Self {
        let order = dfs_order(&nodes, root);
        let chance_weights = nodes
            .iter()
            .map(|n| match &n.kind {
                NodeKind::Chance { probs } => probs.iter().map(Prob::to_f64).collect(),
                _ => Vec::new(),
            })
            .collect();
        Game {
            title: title.into(),
            comment: None,
            players,
            nodes,
            root,
            infosets,
            order,
            chance_weights,
            annotations: None,
        }
    }

    pub fn with_title(mut self, title: impl Into<String>) -> Self {
        self.title = title.into();
        self
    }

    pub fn with_comment(mut self, comment: Option<String>) -> Self {
        self.comment = comment;
        self
    }

    pub fn with_annotations(mut self, annotations: Option<serde_json::Value>) -> Self {
        self.annotations = annotations;
        self
    }

    pub fn title(&self) -> &str {
        &self.title
    }

    pub fn comment(&self) -> Option<&str> {
        self.comment.as_deref()
    }

    pub fn annotations(&self) -> Option<&serde_json::Value> {
        self.annotations.as_ref()
    }

    pub fn players(&self) -> &[Player] {
        &self.players
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn player_by_name(&self, name: &str) -> Option<usize> {
        self.players.iter().position(|p| p.name == name)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn infosets(&self) -> &[Infoset] {
        &self.infosets
    }

    pub fn infoset(&self, id: InfosetId) -> &Infoset {
        &self.infosets[id]
    }

    /// Infosets owned by `player`, in id order.
    pub fn player_infosets(&self, player: usize) -> impl Iterator<Item = &Infoset> + '_ {
        self.infosets.iter().filter(move |i| i.owner == player)
    }

    pub fn infoset_by_name(&self, name: &str) -> Option<InfosetId> {
        self.infosets.iter().position(|i| i.name == name)
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.nodes.iter().position(|n| n.name == name)
    }

    /// Nodes in depth-first pre-order from the root. Parents precede children.
    pub fn preorder(&self) -> &[NodeId] {
        &self.order
    }

    /// Chance probabilities of `node` as floats; empty for non-chance nodes.
    pub fn chance_weights(&self, node: NodeId) -> &[f64] {
        &self.chance_weights[node]
    }

    pub fn terminals(&self) -> impl Iterator<Item = &Node> + '_ {
        self.order.iter().map(|&i| &self.nodes[i]).filter(|n| n.is_terminal())
    }

    pub fn edge_count(&self) -> usize {
        self.nodes.iter().map(|n| n.children.len()).sum()
    }

    /// Nested description of the subtree at `node`. Infoset keys are derived
    /// from the current infoset ids so the partition survives a rebuild.
    pub fn subtree_spec(&self, node: NodeId) -> NodeSpec {
        let n = &self.nodes[node];
        match &n.kind {
            NodeKind::Terminal { outcome, payoffs } => NodeSpec::Terminal {
                name: n.name.clone(),
                outcome: outcome.clone(),
                payoffs: payoffs.clone(),
            },
            NodeKind::Chance { probs } => NodeSpec::Chance {
                name: n.name.clone(),
                branches: n
                    .children
                    .iter()
                    .zip(probs)
                    .map(|(e, p)| (e.label.clone(), p.clone(), self.subtree_spec(e.child)))
                    .collect(),
            },
            NodeKind::Decision { player, infoset } => NodeSpec::Decision {
                name: n.name.clone(),
                player: *player,
                infoset: format!("#{infoset}"),
                infoset_name: Some(self.infosets[*infoset].name.clone()),
                actions: n
                    .children
                    .iter()
                    .map(|e| (e.label.clone(), self.subtree_spec(e.child)))
                    .collect(),
            },
        }
    }

    pub fn to_spec(&self) -> GameSpec {
        GameSpec {
            title: self.title.clone(),
            comment: self.comment.clone(),
            players: self.players.iter().map(|p| p.name.clone()).collect(),
            root: self.subtree_spec(self.root),
            annotations: self.annotations.clone(),
        }
    }

    /// First structural difference between two games, if any. Compares tree
    /// shape, labels, players, infoset partition and chance probabilities;
    /// payoffs too (to [`PAYOFF_EQ_TOL`]) when `payoffs` is set.
    pub fn structural_diff(&self, other: &Game, payoffs: bool) -> Option<String> {
        if self.players.len() != other.players.len() {
            return Some(format!("player count {} vs {}", self.players.len(), other.players.len()));
        }
        for (a, b) in self.players.iter().zip(&other.players) {
            if a.name != b.name {
                return Some(format!("player {} named `{}` vs `{}`", a.index, a.name, b.name));
            }
        }
        if self.order.len() != other.order.len() {
            return Some(format!("node count {} vs {}", self.order.len(), other.order.len()));
        }
        let mut iset_map: HashMap<InfosetId, InfosetId> = HashMap::new();
        let mut iset_back: HashMap<InfosetId, InfosetId> = HashMap::new();
        let mut pos_a = vec![usize::MAX; self.nodes.len()];
        let mut pos_b = vec![usize::MAX; other.nodes.len()];
        for (k, (&x, &y)) in self.order.iter().zip(&other.order).enumerate() {
            pos_a[x] = k;
            pos_b[y] = k;
        }
        for (k, (&x, &y)) in self.order.iter().zip(&other.order).enumerate() {
            let (na, nb) = (&self.nodes[x], &other.nodes[y]);
            let labels_a: Vec<&str> = na.children.iter().map(|e| e.label.as_str()).collect();
            let labels_b: Vec<&str> = nb.children.iter().map(|e| e.label.as_str()).collect();
            if labels_a != labels_b {
                return Some(format!("node #{k}: branch labels {labels_a:?} vs {labels_b:?}"));
            }
            for (ea, eb) in na.children.iter().zip(&nb.children) {
                if pos_a[ea.child] != pos_b[eb.child] {
                    return Some(format!("node #{k}: child positions differ"));
                }
            }
            match (&na.kind, &nb.kind) {
                (NodeKind::Terminal { payoffs: pa, .. }, NodeKind::Terminal { payoffs: pb, .. }) => {
                    if payoffs
                        && (pa.len() != pb.len()
                            || pa.iter().zip(pb).any(|(u, v)| (u - v).abs() > PAYOFF_EQ_TOL))
                    {
                        return Some(format!("node #{k}: payoffs {pa:?} vs {pb:?}"));
                    }
                }
                (NodeKind::Chance { probs: pa }, NodeKind::Chance { probs: pb }) => {
                    if pa != pb {
                        return Some(format!("node #{k}: chance probabilities differ"));
                    }
                }
                (
                    NodeKind::Decision { player: qa, infoset: ia },
                    NodeKind::Decision { player: qb, infoset: ib },
                ) => {
                    if qa != qb {
                        return Some(format!("node #{k}: player {qa} vs {qb}"));
                    }
                    let fwd = *iset_map.entry(*ia).or_insert(*ib);
                    let back = *iset_back.entry(*ib).or_insert(*ia);
                    if fwd != *ib || back != *ia {
                        return Some(format!("node #{k}: infoset partition differs"));
                    }
                }
                _ => return Some(format!("node #{k}: node kinds differ")),
            }
        }
        None
    }

    pub fn structurally_eq(&self, other: &Game) -> bool {
        self.structural_diff(other, true).is_none()
    }
}

fn dfs_order(nodes: &[Node], root: NodeId) -> Vec<NodeId> {
    let mut order = Vec::with_capacity(nodes.len());
    if root >= nodes.len() {
        return order;
    }
    let mut seen = vec![false; nodes.len()];
    let mut stack = vec![root];
    while let Some(n) = stack.pop() {
        if seen[n] {
            continue;
        }
        seen[n] = true;
        order.push(n);
        for e in nodes[n].children.iter().rev() {
            if e.child < nodes.len() && !seen[e.child] {
                stack.push(e.child);
            }
        }
    }
    order
}

/// Checks every structural invariant of `g`. Returns an empty list iff the
/// game is well-formed with perfect recall; recall violations are warnings.
pub fn validate(g: &Game) -> Vec<Diagnostic> {
    let mut issues = Vec::new();
    let n = g.nodes.len();

    if g.players.is_empty() {
        issues.push(Issue::NoPlayers);
    }
    let mut names = HashSet::new();
    for p in &g.players {
        if !names.insert(p.name.as_str()) {
            issues.push(Issue::DuplicatePlayerName { name: p.name.clone() });
        }
    }

    let mut node_names: HashMap<&str, NodeId> = HashMap::new();
    for (i, node) in g.nodes.iter().enumerate() {
        if node.id != i {
            issues.push(Issue::DuplicateNodeId { node: node.id });
        } else if !node.name.is_empty() && node_names.insert(node.name.as_str(), i).is_some() {
            issues.push(Issue::DuplicateNodeId { node: i });
        }
    }

    if g.root >= n {
        issues.push(Issue::UnknownNode { node: g.root });
        return finish(issues);
    }

    // Tree shape: every node reached exactly once from the root.
    let mut visits = vec![0usize; n];
    let mut stack = vec![g.root];
    let mut reported_cycle = HashSet::new();
    while let Some(v) = stack.pop() {
        visits[v] += 1;
        if visits[v] > 1 {
            if reported_cycle.insert(v) {
                issues.push(Issue::Cycle { node: v });
            }
            continue;
        }
        for e in &g.nodes[v].children {
            if e.child >= n {
                issues.push(Issue::UnknownNode { node: e.child });
            } else {
                stack.push(e.child);
            }
        }
    }
    for (i, &count) in visits.iter().enumerate() {
        if count == 0 {
            issues.push(Issue::OrphanNode { node: i });
        }
    }
    if g.nodes[g.root].parent.is_some() {
        issues.push(Issue::ParentMismatch { node: g.root });
    }
    for node in &g.nodes {
        for e in &node.children {
            if e.child < n && g.nodes[e.child].parent != Some(node.id) {
                issues.push(Issue::ParentMismatch { node: e.child });
            }
        }
    }

    for node in &g.nodes {
        let id = node.id;
        match &node.kind {
            NodeKind::Terminal { payoffs, .. } => {
                if !node.children.is_empty() {
                    issues.push(Issue::TerminalWithChildren { node: id });
                }
                if payoffs.len() != g.players.len() {
                    issues.push(Issue::PayoffLength {
                        node: id,
                        expected: g.players.len(),
                        found: payoffs.len(),
                    });
                }
                if payoffs.iter().any(|x| !x.is_finite()) {
                    issues.push(Issue::NonFinitePayoff { node: id });
                }
            }
            NodeKind::Chance { probs } => {
                if node.children.is_empty() {
                    issues.push(Issue::MissingChildren { node: id });
                }
                if probs.len() != node.children.len() {
                    issues.push(Issue::ChanceArity { node: id });
                }
                if probs.iter().any(Prob::is_negative) {
                    issues.push(Issue::NegativeChanceProb { node: id });
                }
                if Prob::sum(probs) != Prob::one() {
                    issues.push(Issue::ChanceProbsNotNormalized { node: id });
                }
            }
            NodeKind::Decision { player, infoset } => {
                if node.children.is_empty() {
                    issues.push(Issue::MissingChildren { node: id });
                }
                if *player >= g.players.len() {
                    issues.push(Issue::UnknownPlayer { node: id });
                }
                match g.infosets.get(*infoset) {
                    None => issues.push(Issue::UnknownInfoset { node: id }),
                    Some(iset) => {
                        if iset.members.iter().filter(|&&m| m == id).count() != 1 {
                            issues.push(Issue::InfosetPartition { node: id });
                        }
                    }
                }
            }
        }
    }

    for (k, iset) in g.infosets.iter().enumerate() {
        if iset.members.is_empty() {
            issues.push(Issue::EmptyInfoset { infoset: k });
        }
        for &m in &iset.members {
            let Some(node) = g.nodes.get(m) else {
                issues.push(Issue::UnknownNode { node: m });
                continue;
            };
            match node.kind {
                NodeKind::Decision { player, infoset } => {
                    if infoset != k {
                        issues.push(Issue::InfosetPartition { node: m });
                    }
                    if player != iset.owner {
                        issues.push(Issue::InfosetOwnerMismatch { infoset: k, node: m });
                    }
                    let labels: Vec<&str> = node.children.iter().map(|e| e.label.as_str()).collect();
                    if labels.len() != iset.actions.len()
                        || labels.iter().zip(&iset.actions).any(|(a, b)| a != b)
                    {
                        issues.push(Issue::InfosetShapeMismatch { infoset: k, node: m });
                    }
                }
                _ => issues.push(Issue::InfosetOwnerMismatch { infoset: k, node: m }),
            }
        }
    }

    let structural_errors = !issues.is_empty();
    if !structural_errors {
        for k in imperfect_recall(g) {
            issues.push(Issue::ImperfectRecall { infoset: k });
        }
    }
    finish(issues)
}

fn finish(issues: Vec<Issue>) -> Vec<Diagnostic> {
    issues
        .into_iter()
        .map(|issue| Diagnostic { severity: issue.severity(), issue })
        .collect()
}

/// Infosets whose members disagree on the owner's own-move history.
fn imperfect_recall(g: &Game) -> Vec<InfosetId> {
    // Own-move history of the node's mover: (infoset, action) pairs on the
    // root path, restricted to that player's moves.
    let mut history: Vec<Vec<(InfosetId, usize)>> = vec![Vec::new(); g.nodes.len()];
    let mut per_player: Vec<Vec<Vec<(InfosetId, usize)>>> =
        vec![vec![Vec::new(); g.players.len()]; g.nodes.len()];
    for &v in &g.order {
        let node = &g.nodes[v];
        if let NodeKind::Decision { player, .. } = node.kind {
            history[v] = per_player[v][player].clone();
        }
        for (a, e) in node.children.iter().enumerate() {
            let mut h = per_player[v].clone();
            if let NodeKind::Decision { player, infoset } = node.kind {
                h[player].push((infoset, a));
            }
            per_player[e.child] = h;
        }
    }
    let mut seen: BTreeMap<InfosetId, &Vec<(InfosetId, usize)>> = BTreeMap::new();
    let mut bad = Vec::new();
    for iset in &g.infosets {
        for &m in &iset.members {
            match seen.get(&iset.id) {
                None => {
                    seen.insert(iset.id, &history[m]);
                }
                Some(h) if *h != &history[m] => {
                    bad.push(iset.id);
                    break;
                }
                _ => {}
            }
        }
    }
    bad
}

/// The subtree rooted at `new_root` as a standalone game. Infosets keep only
/// their surviving members; payoffs and players are unchanged.
pub fn reroot(g: &Game, new_root: NodeId) -> Result<Game, GameError> {
    if new_root >= g.nodes.len() {
        return Err(GameError::UnknownNode(new_root));
    }
    build_game(GameSpec {
        title: g.title.clone(),
        comment: g.comment.clone(),
        players: g.players.iter().map(|p| p.name.clone()).collect(),
        root: g.subtree_spec(new_root),
        annotations: g.annotations.clone(),
    })
}
