use serde::{Deserialize, Serialize};

use crate::backends::{ChatMessage, Role};

/// Default character budget for the rolling history.
pub const DEFAULT_CONTEXT_CHARS: usize = 24_000;

/// Bounded conversation memory.
///
/// The first message (goal and instruction) is pinned. When an append pushes
/// the total content length over `capacity`, the oldest unpinned messages are
/// evicted first. A single message that cannot fit even on its own is cut to
/// the remaining budget.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextBuffer {
    messages: Vec<ChatMessage>,
    capacity: usize,
}

impl ContextBuffer {
    pub fn new(initial: ChatMessage, capacity: usize) -> Self {
        Self {
            messages: vec![initial],
            capacity,
        }
    }

    /// A buffer with no pinned message; `build_prompt` rejects it.
    pub fn empty(capacity: usize) -> Self {
        Self {
            messages: Vec::new(),
            capacity,
        }
    }

    pub fn messages(&self) -> &[ChatMessage] {
        &self.messages
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    pub fn initial(&self) -> Option<&ChatMessage> {
        self.messages.first()
    }

    pub fn total_chars(&self) -> usize {
        self.messages.iter().map(|m| m.content.chars().count()).sum()
    }

    pub fn push(&mut self, role: Role, content: impl Into<String>) {
        let mut message = ChatMessage::new(role, content);
        if self.messages.is_empty() {
            self.messages.push(message);
            return;
        }
        let pinned = self.messages[0].content.chars().count();
        let budget = self.capacity.saturating_sub(pinned);
        if message.content.chars().count() > budget {
            message.content = message.content.chars().take(budget).collect();
        }
        self.messages.push(message);
        while self.total_chars() > self.capacity && self.messages.len() > 2 {
            self.messages.remove(1);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn goal() -> ChatMessage {
        ChatMessage::new(Role::Human, "goal: buy a box")
    }

    #[test]
    fn evicts_oldest_unpinned_first() {
        let mut ctx = ContextBuffer::new(goal(), 15 + 30);
        ctx.push(Role::Assistant, "a".repeat(10));
        ctx.push(Role::Human, "b".repeat(10));
        ctx.push(Role::Assistant, "c".repeat(10));
        assert_eq!(ctx.len(), 4);
        ctx.push(Role::Human, "d".repeat(10));
        assert_eq!(ctx.len(), 4);
        assert_eq!(ctx.messages()[0], goal());
        assert!(ctx.messages()[1].content.starts_with('b'));
        assert!(ctx.total_chars() <= ctx.capacity());
    }

    #[test]
    fn oversized_message_is_cut_to_budget() {
        let mut ctx = ContextBuffer::new(goal(), 20);
        ctx.push(Role::Human, "x".repeat(100));
        assert_eq!(ctx.len(), 2);
        assert_eq!(ctx.total_chars(), 20);
        assert_eq!(ctx.messages()[0], goal());
    }

    #[test]
    fn pinned_message_survives_many_appends() {
        let mut ctx = ContextBuffer::new(goal(), 200);
        for i in 0..500 {
            ctx.push(Role::Assistant, format!("message number {i}"));
            assert_eq!(ctx.initial(), Some(&goal()));
            assert!(ctx.total_chars() <= 200);
        }
    }
}
