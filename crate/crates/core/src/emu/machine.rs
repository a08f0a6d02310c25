use std::collections::HashMap;

use super::{prf, AccessKind, MemoryEvent, REG_DOMAIN, STACK_DOMAIN};
use crate::asm::{Gpr, Register};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Flags {
    pub zf: bool,
    pub sf: bool,
    pub cf: bool,
    pub of: bool,
}

/// Sparse little-endian byte store. A byte read before any write holds
/// `prf(seed, address) as u8`.
#[derive(Debug, Clone)]
pub struct Memory {
    seed: u64,
    written: HashMap<u64, u8>,
}

impl Memory {
    pub fn new(seed: u64) -> Self {
        Memory {
            seed,
            written: HashMap::new(),
        }
    }

    pub fn byte(&self, address: u64) -> u8 {
        self.written
            .get(&address)
            .copied()
            .unwrap_or_else(|| prf(self.seed, address) as u8)
    }

    pub fn load(&self, address: u64, size: u8) -> u64 {
        (0..size as u64).fold(0u64, |acc, i| {
            acc | (self.byte(address.wrapping_add(i)) as u64) << (8 * i)
        })
    }

    pub fn store(&mut self, address: u64, size: u8, value: u64) {
        for i in 0..size as u64 {
            self.written
                .insert(address.wrapping_add(i), (value >> (8 * i)) as u8);
        }
    }
}

#[derive(Debug, Clone)]
pub struct MachineState {
    pub gpr: [u64; 16],
    /// Instruction index.
    pub rip: usize,
    pub flags: Flags,
    pub memory: Memory,
    pub events: Vec<MemoryEvent>,
}

/// Stack base for `seed`: `0x7ff0_0000_0000` plus a 16-aligned seeded offset
/// below 64 GiB.
pub fn stack_base(seed: u64) -> u64 {
    0x0000_7ff0_0000_0000 | (prf(seed, STACK_DOMAIN) & 0x0000_000f_ffff_fff0)
}

pub(crate) fn mask(bits: u8) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

pub(crate) fn sign_extend(value: u64, bits: u8) -> i64 {
    if bits >= 64 {
        value as i64
    } else {
        let shift = 64 - bits as u32;
        ((value << shift) as i64) >> shift
    }
}

impl MachineState {
    /// Registers from `prf(seed, REG_DOMAIN + i)`; `rsp = rbp = stack_base(seed)`.
    pub fn new(seed: u64) -> Self {
        let mut gpr = [0u64; 16];
        for (i, r) in gpr.iter_mut().enumerate() {
            *r = prf(seed, REG_DOMAIN.wrapping_add(i as u64));
        }
        let base = stack_base(seed);
        gpr[Gpr::Rsp.index()] = base;
        gpr[Gpr::Rbp.index()] = base;
        MachineState {
            gpr,
            rip: 0,
            flags: Flags::default(),
            memory: Memory::new(seed),
            events: Vec::new(),
        }
    }

    pub fn reg64(&self, family: Gpr) -> u64 {
        self.gpr[family.index()]
    }

    pub fn set_reg64(&mut self, family: Gpr, value: u64) {
        self.gpr[family.index()] = value;
    }

    /// Zero-extended value of a (sub-)register view.
    pub fn read_reg(&self, r: Register) -> u64 {
        let full = self.gpr[r.family.index()];
        if r.high_byte {
            (full >> 8) & 0xff
        } else {
            full & mask(r.width)
        }
    }

    /// 32-bit writes zero-extend into the full register; 8- and 16-bit
    /// writes merge.
    pub fn write_reg(&mut self, r: Register, value: u64) {
        let slot = &mut self.gpr[r.family.index()];
        *slot = match (r.width, r.high_byte) {
            (64, _) => value,
            (32, _) => value & 0xffff_ffff,
            (8, true) => (*slot & !0xff00) | ((value & 0xff) << 8),
            (w, _) => (*slot & !mask(w)) | (value & mask(w)),
        };
    }

    pub fn load(&mut self, address: u64, size: u8) -> u64 {
        let value = self.memory.load(address, size);
        self.events.push(MemoryEvent {
            kind: AccessKind::Read,
            address,
            size,
            value,
        });
        value
    }

    pub fn store(&mut self, address: u64, size: u8, value: u64) {
        let value = value & mask(size * 8);
        self.memory.store(address, size, value);
        self.events.push(MemoryEvent {
            kind: AccessKind::Write,
            address,
            size,
            value,
        });
    }

    pub fn push(&mut self, value: u64) {
        let rsp = self.reg64(Gpr::Rsp).wrapping_sub(8);
        self.set_reg64(Gpr::Rsp, rsp);
        self.store(rsp, 8, value);
    }

    pub fn pop(&mut self) -> u64 {
        let rsp = self.reg64(Gpr::Rsp);
        let value = self.load(rsp, 8);
        self.set_reg64(Gpr::Rsp, rsp.wrapping_add(8));
        value
    }
}
