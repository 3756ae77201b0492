use serde::Serialize;

use super::NodeId;

/// Which sends a rule applies to. `None` fields match anything.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Matcher {
    pub from: Option<NodeId>,
    pub to: Option<NodeId>,
    pub type_tag: Option<u8>,
    pub step: Option<usize>,
}

impl Matcher {
    pub fn any() -> Self {
        Self::default()
    }

    pub fn from(mut self, n: NodeId) -> Self {
        self.from = Some(n);
        self
    }

    pub fn to(mut self, n: NodeId) -> Self {
        self.to = Some(n);
        self
    }

    pub fn tag(mut self, t: u8) -> Self {
        self.type_tag = Some(t);
        self
    }

    pub fn step(mut self, s: usize) -> Self {
        self.step = Some(s);
        self
    }

    pub fn matches(&self, from: NodeId, to: NodeId, type_tag: Option<u8>, step: usize) -> bool {
        self.from.is_none_or(|f| f == from)
            && self.to.is_none_or(|t| t == to)
            && self.type_tag.is_none_or(|t| Some(t) == type_tag)
            && self.step.is_none_or(|s| s == step)
    }
}

/// XOR `xor` into the frame byte at `offset`. Negative offsets count from
/// the end (`-1` is the last byte). Offsets outside the frame are ignored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ByteEdit {
    pub offset: i64,
    pub xor: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Action {
    Deliver,
    Drop,
    Modify(Vec<ByteEdit>),
    /// Swallow the matched frame and deliver the frame of transcript event
    /// `n` in its place.
    Replay(usize),
    /// Swallow the matched frame and deliver these bytes instead.
    Inject(Vec<u8>),
    Redirect(NodeId),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Rule {
    pub matcher: Matcher,
    pub action: Action,
}

/// Ordered interposition rules. The first matching rule decides; frames no
/// rule matches are delivered untouched.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AdversaryScript {
    pub rules: Vec<Rule>,
}

impl AdversaryScript {
    pub fn passive() -> Self {
        Self::default()
    }

    pub fn rule(mut self, matcher: Matcher, action: Action) -> Self {
        self.rules.push(Rule { matcher, action });
        self
    }

    pub fn decide(&self, from: NodeId, to: NodeId, type_tag: Option<u8>, step: usize) -> &Action {
        self.rules
            .iter()
            .find(|r| r.matcher.matches(from, to, type_tag, step))
            .map_or(&Action::Deliver, |r| &r.action)
    }
}

pub(crate) fn apply_edits(bytes: &mut [u8], edits: &[ByteEdit]) {
    let len = bytes.len() as i64;
    for e in edits {
        let at = if e.offset < 0 {
            len + e.offset
        } else {
            e.offset
        };
        if (0..len).contains(&at) {
            bytes[at as usize] ^= e.xor;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_match_wins() {
        let s = AdversaryScript::passive()
            .rule(Matcher::any().tag(2).step(1), Action::Drop)
            .rule(Matcher::any().tag(2), Action::Redirect(NodeId::Cn));
        let ue = NodeId::Ue(0);
        let g = NodeId::Gnb(0);
        assert_eq!(s.decide(ue, g, Some(2), 1), &Action::Drop);
        assert_eq!(s.decide(ue, g, Some(2), 0), &Action::Redirect(NodeId::Cn));
        assert_eq!(s.decide(ue, g, Some(3), 1), &Action::Deliver);
        assert_eq!(s.decide(ue, g, None, 1), &Action::Deliver);
    }

    #[test]
    fn edits_past_end_are_ignored() {
        let mut b = vec![0u8; 3];
        let edits = [
            ByteEdit {
                offset: 1,
                xor: 0xFF,
            },
            ByteEdit { offset: 9, xor: 1 },
            ByteEdit { offset: -1, xor: 2 },
            ByteEdit { offset: -4, xor: 1 },
        ];
        apply_edits(&mut b, &edits);
        assert_eq!(b, [0, 0xFF, 2]);
    }
}
