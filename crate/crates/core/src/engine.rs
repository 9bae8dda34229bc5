//! Synchronous round engine.
//!
//! Each round is a blue turn followed by a red turn. Messages sent during a
//! turn are delivered at the start of the next turn of the receiving colour,
//! so proposals made in the red turn of round `i` are read by blue nodes in
//! round `i + 1`, and blue answers are read by red nodes in the same round.
//!
//! A red node keeps its candidate list `C(r)` as a cursor into its preference
//! list: rejects and breaks always remove the current head, so `C(r)` is the
//! suffix of the list starting at the cursor.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::analysis;
use crate::graph::{BicolouredGraph, Colour, Edge, Matching, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MessageKind {
    Propose,
    Accept,
    Reject,
    Break,
}

impl fmt::Display for MessageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MessageKind::Propose => "propose",
            MessageKind::Accept => "accept",
            MessageKind::Reject => "reject",
            MessageKind::Break => "break",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Message {
    pub kind: MessageKind,
    pub sender: NodeId,
    pub receiver: NodeId,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MessageCounts {
    pub propose: u64,
    pub accept: u64,
    pub reject: u64,
    pub breaks: u64,
}

impl MessageCounts {
    fn add(&mut self, kind: MessageKind) {
        match kind {
            MessageKind::Propose => self.propose += 1,
            MessageKind::Accept => self.accept += 1,
            MessageKind::Reject => self.reject += 1,
            MessageKind::Break => self.breaks += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.propose + self.accept + self.reject + self.breaks
    }
}

/// A protocol violation. None of these can arise from a valid graph; seeing
/// one means the engine itself is broken.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EngineFault {
    #[error("{kind} from {sender} to {receiver}: nodes are not adjacent")]
    NotAdjacent { kind: MessageKind, sender: NodeId, receiver: NodeId },
    #[error("{kind} from {sender} to {receiver} travels in the wrong direction")]
    WrongDirection { kind: MessageKind, sender: NodeId, receiver: NodeId },
    #[error("red node {red} got an unexpected {kind} from {sender}")]
    UnexpectedMessage { red: NodeId, kind: MessageKind, sender: NodeId },
    #[error("red node {red} got no answer from its candidate {candidate}")]
    MissingResponse { red: NodeId, candidate: NodeId },
    #[error("red node {red} lost {blue}, which is not the head of its candidate list")]
    NotHead { red: NodeId, blue: NodeId },
    #[error("matching views disagree at node {node}")]
    Inconsistent { node: NodeId },
    #[error("no convergence after {rounds} rounds")]
    NoConvergence { rounds: usize },
    #[error("converged matching has {count} unstable edges")]
    UnstableAtConvergence { count: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct RedState {
    // C(r) = neighbours(r)[next..]
    next: usize,
    candidate: Option<NodeId>,
    partner: Option<NodeId>,
}

/// State of a running simulation over one graph.
#[derive(Clone, Debug)]
pub struct Engine<'g> {
    graph: &'g BicolouredGraph,
    reds: Vec<RedState>,
    blue_partner: Vec<Option<NodeId>>,
    blue_inbox: Vec<Vec<Message>>,
    red_inbox: Vec<Vec<Message>>,
    lost: Vec<Edge>,
    round: usize,
}

impl<'g> Engine<'g> {
    /// Initial state: full candidate lists, nobody matched, no messages in flight.
    pub fn new(graph: &'g BicolouredGraph) -> Self {
        Engine {
            graph,
            reds: vec![RedState::default(); graph.red_count() as usize],
            blue_partner: vec![None; graph.blue_count() as usize],
            blue_inbox: vec![Vec::new(); graph.blue_count() as usize],
            red_inbox: vec![Vec::new(); graph.red_count() as usize],
            lost: Vec::new(),
            round: 0,
        }
    }

    pub fn graph(&self) -> &'g BicolouredGraph {
        self.graph
    }

    /// Number of completed rounds.
    pub fn round(&self) -> usize {
        self.round
    }

    fn blue_slot(&self, b: NodeId) -> usize {
        b.index() - self.graph.red_count() as usize
    }

    /// `C(r)`, most preferred first.
    pub fn candidates(&self, r: NodeId) -> &'g [NodeId] {
        &self.graph.neighbours(r)[self.reds[r.index()].next..]
    }

    /// `c(r)`: the blue node `r` is waiting to hear from.
    pub fn pending(&self, r: NodeId) -> Option<NodeId> {
        self.reds[r.index()].candidate
    }

    /// `p(v)` for a node of either colour.
    pub fn partner(&self, v: NodeId) -> Option<NodeId> {
        match self.graph.colour(v) {
            Colour::Red => self.reds[v.index()].partner,
            Colour::Blue => self.blue_partner[self.blue_slot(v)],
        }
    }

    pub fn is_matched(&self, v: NodeId) -> bool {
        self.partner(v).is_some()
    }

    /// Partner of every node, indexed by [`NodeId::index`].
    pub fn partners(&self) -> Vec<Option<NodeId>> {
        self.reds.iter().map(|s| s.partner).chain(self.blue_partner.iter().copied()).collect()
    }

    /// `M_i` read off the red side.
    pub fn matching(&self) -> Matching {
        Matching::from_edges(
            self.graph.reds().filter_map(|r| self.reds[r.index()].partner.map(|b| Edge::new(r, b))),
        )
    }

    pub fn matching_size(&self) -> usize {
        self.reds.iter().filter(|s| s.partner.is_some()).count()
    }

    /// Lost edges in the order they were lost; a prefix of this is `L_i` for every earlier `i`.
    pub fn lost_edges(&self) -> &[Edge] {
        &self.lost
    }

    /// Checks that the red-side and blue-side matchings coincide.
    pub fn check_consistency(&self) -> Result<(), EngineFault> {
        for r in self.graph.reds() {
            let s = &self.reds[r.index()];
            if let Some(b) = s.partner {
                if self.blue_partner[self.blue_slot(b)] != Some(r) {
                    return Err(EngineFault::Inconsistent { node: r });
                }
                if s.candidate.is_some() {
                    return Err(EngineFault::Inconsistent { node: r });
                }
            }
        }
        for b in self.graph.blues() {
            if let Some(r) = self.blue_partner[self.blue_slot(b)] {
                if self.reds[r.index()].partner != Some(b) {
                    return Err(EngineFault::Inconsistent { node: b });
                }
            }
        }
        Ok(())
    }

    fn deliver(&mut self, msg: Message) -> Result<(), EngineFault> {
        if self.graph.port_of(msg.receiver, msg.sender).is_none() {
            return Err(EngineFault::NotAdjacent {
                kind: msg.kind,
                sender: msg.sender,
                receiver: msg.receiver,
            });
        }
        let towards_blue = msg.kind == MessageKind::Propose;
        let receiver_colour = self.graph.colour(msg.receiver);
        if towards_blue != (receiver_colour == Colour::Blue) {
            return Err(EngineFault::WrongDirection {
                kind: msg.kind,
                sender: msg.sender,
                receiver: msg.receiver,
            });
        }
        match receiver_colour {
            Colour::Blue => {
                let slot = self.blue_slot(msg.receiver);
                self.blue_inbox[slot].push(msg);
            }
            Colour::Red => self.red_inbox[msg.receiver.index()].push(msg),
        }
        Ok(())
    }

    /// Runs one round (blue turn, then red turn) and returns the messages sent in it.
    pub fn step(&mut self) -> Result<MessageCounts, EngineFault> {
        let mut counts = MessageCounts::default();
        self.blue_turn(&mut counts)?;
        self.red_turn(&mut counts)?;
        self.round += 1;
        #[cfg(debug_assertions)]
        self.check_consistency()?;
        Ok(counts)
    }

    fn blue_turn(&mut self, counts: &mut MessageCounts) -> Result<(), EngineFault> {
        let graph = self.graph;
        for b in graph.blues() {
            let slot = self.blue_slot(b);
            let inbox = core::mem::take(&mut self.blue_inbox[slot]);
            if inbox.is_empty() {
                continue;
            }
            let current = self.blue_partner[slot];
            // best = (node, tie group, port); the current match wins ties
            let mut best = current.map(|p| {
                let port = graph.port_of(b, p).expect("partner is a neighbour");
                (p, graph.rank_at(b, port), port)
            });
            for msg in &inbox {
                let port = graph.port_of(b, msg.sender).expect("checked on delivery");
                let rank = graph.rank_at(b, port);
                let better = match best {
                    None => true,
                    Some((node, best_rank, best_port)) => {
                        rank < best_rank
                            || (rank == best_rank && Some(node) != current && port < best_port)
                    }
                };
                if better {
                    best = Some((msg.sender, rank, port));
                }
            }
            let (chosen, _, _) = best.expect("proposer set is nonempty");
            if Some(chosen) != current {
                if let Some(old) = current {
                    self.send(MessageKind::Break, b, old, counts)?;
                }
                self.send(MessageKind::Accept, b, chosen, counts)?;
                self.blue_partner[slot] = Some(chosen);
            }
            for msg in &inbox {
                if msg.sender != chosen {
                    self.send(MessageKind::Reject, b, msg.sender, counts)?;
                }
            }
            // reuse the allocation
            let mut inbox = inbox;
            inbox.clear();
            self.blue_inbox[slot] = inbox;
        }
        Ok(())
    }

    fn red_turn(&mut self, counts: &mut MessageCounts) -> Result<(), EngineFault> {
        let graph = self.graph;
        for r in graph.reds() {
            let mut inbox = core::mem::take(&mut self.red_inbox[r.index()]);
            let mut state = self.reds[r.index()];
            let mut consumed = 0usize;

            if let Some(c) = state.candidate {
                let answer = take_from(&mut inbox, c, &[MessageKind::Accept, MessageKind::Reject])
                    .ok_or(EngineFault::MissingResponse { red: r, candidate: c })?;
                consumed += 1;
                match answer {
                    MessageKind::Accept => state.partner = Some(c),
                    _ => self.drop_head(r, &mut state, c)?,
                }
                state.candidate = None;
            }

            if let Some(p) = state.partner {
                if take_from(&mut inbox, p, &[MessageKind::Break]).is_some() {
                    consumed += 1;
                    self.drop_head(r, &mut state, p)?;
                    state.partner = None;
                }
            }

            if let Some(extra) = inbox.iter().find(|m| m.kind != KIND_TAKEN) {
                return Err(EngineFault::UnexpectedMessage {
                    red: r,
                    kind: extra.kind,
                    sender: extra.sender,
                });
            }
            debug_assert!(consumed <= 2);

            if state.partner.is_none() {
                if let Some(&head) = graph.neighbours(r).get(state.next) {
                    state.candidate = Some(head);
                    self.send(MessageKind::Propose, r, head, counts)?;
                }
            }

            self.reds[r.index()] = state;
            inbox.clear();
            self.red_inbox[r.index()] = inbox;
        }
        Ok(())
    }

    fn drop_head(&mut self, r: NodeId, state: &mut RedState, blue: NodeId) -> Result<(), EngineFault> {
        if self.graph.neighbours(r).get(state.next) != Some(&blue) {
            return Err(EngineFault::NotHead { red: r, blue });
        }
        state.next += 1;
        self.lost.push(Edge::new(r, blue));
        Ok(())
    }

    fn send(
        &mut self,
        kind: MessageKind,
        sender: NodeId,
        receiver: NodeId,
        counts: &mut MessageCounts,
    ) -> Result<(), EngineFault> {
        counts.add(kind);
        self.deliver(Message { kind, sender, receiver })
    }
}

// Marker for messages already read from a red inbox.
const KIND_TAKEN: MessageKind = MessageKind::Propose;

/// Reads the single message from `sender` if its kind is one of `kinds`, and
/// marks it as read. Propose never reaches a red inbox, so it doubles as the
/// "read" marker.
fn take_from(inbox: &mut [Message], sender: NodeId, kinds: &[MessageKind]) -> Option<MessageKind> {
    let msg = inbox.iter_mut().find(|m| m.sender == sender && kinds.contains(&m.kind))?;
    let kind = msg.kind;
    msg.kind = KIND_TAKEN;
    Some(kind)
}

/// Quantities sampled after the red turn of one round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundRecord {
    pub round: usize,
    /// `M_i`
    pub matching: Matching,
    /// `|L_i|`
    pub lost_count: usize,
    /// `w(L_i)`
    pub lost_weight: u64,
    /// `f_i(R)` under the graph's weights
    pub potential: u64,
    /// unmatched red nodes with a nonempty candidate list (`f_i(R)` under unit weights)
    pub active_reds: u64,
    /// `w_i(B)`
    pub blue_weight: u64,
    /// `u_i`
    pub unstable: usize,
    pub messages: MessageCounts,
}

impl RoundRecord {
    /// Reject and break messages are read in the same round they are sent.
    pub fn received_reject_or_break(&self) -> bool {
        self.messages.reject + self.messages.breaks > 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundTrace {
    max_degree: usize,
    rounds: Vec<RoundRecord>,
    lost_log: Vec<Edge>,
}

impl RoundTrace {
    fn new(graph: &BicolouredGraph) -> Self {
        RoundTrace { max_degree: graph.max_degree(), rounds: Vec::new(), lost_log: Vec::new() }
    }

    fn record(&mut self, engine: &Engine<'_>, messages: MessageCounts) {
        let graph = engine.graph();
        self.lost_log.extend_from_slice(&engine.lost_edges()[self.lost_log.len()..]);
        let potential = analysis::potential(engine);
        let matching = engine.matching();
        let blue_weight = matching.weight(graph);
        self.rounds.push(RoundRecord {
            round: engine.round(),
            lost_count: self.lost_log.len(),
            lost_weight: graph.total_weight(&self.lost_log),
            potential: potential.total,
            active_reds: potential.active,
            blue_weight,
            unstable: analysis::unstable_count(graph, &engine.partners()),
            matching,
            messages,
        });
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn rounds(&self) -> &[RoundRecord] {
        &self.rounds
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    /// Record for round `i` (1-based).
    pub fn round(&self, i: usize) -> Option<&RoundRecord> {
        i.checked_sub(1).and_then(|k| self.rounds.get(k))
    }

    pub fn last(&self) -> Option<&RoundRecord> {
        self.rounds.last()
    }

    /// `L_i` (empty for `i = 0`).
    pub fn lost_edges(&self, i: usize) -> &[Edge] {
        match self.round(i) {
            Some(rec) => &self.lost_log[..rec.lost_count],
            None => &[],
        }
    }
}

/// Runs `rounds` rounds and records every §5 quantity after each one.
pub fn run_rounds(graph: &BicolouredGraph, rounds: usize) -> Result<RoundTrace, EngineFault> {
    let mut engine = Engine::new(graph);
    let mut trace = RoundTrace::new(graph);
    for _ in 0..rounds {
        let counts = engine.step()?;
        trace.record(&engine, counts);
    }
    Ok(trace)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergence {
    /// `M_∞`
    pub matching: Matching,
    /// First round `z >= 2` in which no reject or break was received.
    pub round: usize,
    pub trace: RoundTrace,
}

/// Runs until the lost-edge set stops growing, which leaves a stable matching.
pub fn run_to_convergence(graph: &BicolouredGraph) -> Result<Convergence, EngineFault> {
    let mut engine = Engine::new(graph);
    let mut trace = RoundTrace::new(graph);
    let limit = graph.edge_count() + 2;
    loop {
        let counts = engine.step()?;
        trace.record(&engine, counts);
        let rec = trace.last().expect("just recorded");
        if engine.round() >= 2 && !rec.received_reject_or_break() {
            if rec.unstable != 0 {
                return Err(EngineFault::UnstableAtConvergence { count: rec.unstable });
            }
            return Ok(Convergence { matching: rec.matching.clone(), round: engine.round(), trace });
        }
        if engine.round() > limit {
            return Err(EngineFault::NoConvergence { rounds: engine.round() });
        }
    }
}
