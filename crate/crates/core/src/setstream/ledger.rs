/// Abstract-unit space accounting for one algorithm run.
///
/// One slot holds one element ID, set/node ID, or sketch register. Every
/// counter is a high-water mark: the `record_*` methods only ever raise it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SpaceLedger {
    element_slots: usize,
    set_id_slots: usize,
    sketch_registers: usize,
    passes: usize,
}

impl SpaceLedger {
    pub const WORD_BYTES: usize = 8;

    pub fn new() -> Self {
        Self::default()
    }

    pub fn record_elements(&mut self, current: usize) {
        self.element_slots = self.element_slots.max(current);
    }

    pub fn record_set_ids(&mut self, current: usize) {
        self.set_id_slots = self.set_id_slots.max(current);
    }

    pub fn record_sketch_registers(&mut self, current: usize) {
        self.sketch_registers = self.sketch_registers.max(current);
    }

    pub fn record_pass(&mut self) {
        self.passes += 1;
    }

    pub fn set_passes(&mut self, passes: usize) {
        self.passes = self.passes.max(passes);
    }

    pub fn element_slots(&self) -> usize {
        self.element_slots
    }

    pub fn set_id_slots(&self) -> usize {
        self.set_id_slots
    }

    pub fn sketch_registers(&self) -> usize {
        self.sketch_registers
    }

    pub fn passes(&self) -> usize {
        self.passes
    }

    pub fn total_slots(&self) -> usize {
        self.element_slots + self.set_id_slots + self.sketch_registers
    }

    pub fn byte_estimate(&self) -> usize {
        self.total_slots() * Self::WORD_BYTES
    }

    /// Folds another ledger in as if both ran concurrently from the start.
    pub fn absorb_peaks(&mut self, other: &SpaceLedger) {
        self.element_slots = self.element_slots.max(other.element_slots);
        self.set_id_slots = self.set_id_slots.max(other.set_id_slots);
        self.sketch_registers = self.sketch_registers.max(other.sketch_registers);
        self.passes = self.passes.max(other.passes);
    }
}
