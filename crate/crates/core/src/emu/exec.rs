use super::machine::{mask, sign_extend, MachineState};
use super::{
    fnv1a64, prf, ExecutionTrace, HaltReason, CALL_DOMAIN, CODE_DOMAIN, FS_DOMAIN, GS_DOMAIN,
    SYMBOL_DOMAIN,
};
use crate::asm::{condition_code, AssemblyFunction, Gpr, Instruction, MemoryOperand, Operand, Register, Segment};

/// Caller-saved registers clobbered by an external call (System V), besides `rax`.
const CALL_CLOBBERED: [Gpr; 8] = [
    Gpr::Rcx,
    Gpr::Rdx,
    Gpr::Rsi,
    Gpr::Rdi,
    Gpr::R8,
    Gpr::R9,
    Gpr::R10,
    Gpr::R11,
];

/// Bytes per instruction slot when an instruction index is turned into an
/// address (return addresses, `rip`-relative operands).
const SLOT_BYTES: u64 = 4;

pub fn is_supported_mnemonic(m: &str) -> bool {
    matches!(
        m,
        "mov" | "movzx" | "movsx" | "movsxd" | "lea" | "add" | "sub" | "imul" | "mul" | "idiv"
            | "div" | "inc" | "dec" | "neg" | "not" | "and" | "or" | "xor" | "shl" | "sal"
            | "shr" | "sar" | "cmp" | "test" | "push" | "pop" | "jmp" | "call" | "ret" | "retn" | "nop"
            | "cdq" | "cqo" | "cdqe" | "leave"
    ) || condition_code(m).is_some()
}

enum Flow {
    Next,
    Jump(usize),
    Finish,
}

type Step = Result<Flow, HaltReason>;

const UNSUPPORTED: HaltReason = HaltReason::UnsupportedInstruction;

pub(crate) struct Executor<'f> {
    f: &'f AssemblyFunction,
    seed: u64,
    state: MachineState,
    code_base: u64,
    depth: usize,
}

impl<'f> Executor<'f> {
    pub fn new(f: &'f AssemblyFunction, seed: u64) -> Self {
        Executor {
            f,
            seed,
            state: MachineState::new(seed),
            code_base: 0x0000_5555_0000_0000 | (prf(seed, CODE_DOMAIN) & 0xffff_f000),
            depth: 0,
        }
    }

    pub fn run(mut self, max_instructions: usize) -> ExecutionTrace {
        let mut executed = 0usize;
        let halt = loop {
            let rip = self.state.rip;
            let Some(ins) = self.f.instructions.get(rip) else {
                break HaltReason::Fault;
            };
            if executed >= max_instructions {
                break HaltReason::InstructionLimit;
            }
            match self.step(ins) {
                Ok(Flow::Next) => {
                    executed += 1;
                    self.state.rip = rip + 1;
                }
                Ok(Flow::Jump(target)) => {
                    executed += 1;
                    self.state.rip = target;
                }
                Ok(Flow::Finish) => {
                    executed += 1;
                    break HaltReason::Ret;
                }
                Err(reason) => break reason,
            }
        };
        let s = self.state;
        ExecutionTrace {
            final_rax: s.reg64(Gpr::Rax),
            final_rsp: s.reg64(Gpr::Rsp),
            final_rbp: s.reg64(Gpr::Rbp),
            final_gpr: s.gpr,
            events: s.events,
            executed_count: executed,
            halt_reason: halt,
            halt_index: s.rip,
        }
    }

    fn symbol_address(&self, symbol: &str) -> u64 {
        if let Some(idx) = self.f.label_index(symbol) {
            return self.code_address(idx);
        }
        0x0000_4000_0000_0000 | (prf(self.seed, SYMBOL_DOMAIN ^ fnv1a64(symbol.as_bytes())) & 0x0fff_ffff_fff0)
    }

    fn code_address(&self, index: usize) -> u64 {
        self.code_base.wrapping_add(index as u64 * SLOT_BYTES)
    }

    fn effective_address(&self, m: &MemoryOperand) -> u64 {
        let mut narrow = false;
        let mut ea = m.displacement as u64;
        if let Some(sym) = &m.symbol {
            ea = ea.wrapping_add(self.symbol_address(sym));
        }
        if let Some(base) = m.base {
            let v = if base.family == Gpr::Rip {
                self.code_address(self.state.rip + 1)
            } else {
                narrow |= base.width == 32;
                self.state.read_reg(base)
            };
            ea = ea.wrapping_add(v);
        }
        if let Some(idx) = m.index {
            narrow |= idx.register.width == 32;
            ea = ea.wrapping_add(self.state.read_reg(idx.register).wrapping_mul(idx.scale as u64));
        }
        if narrow {
            ea &= 0xffff_ffff;
        }
        match m.segment {
            Some(Segment::Fs) => ea.wrapping_add(0x7fff_0000_0000 | (prf(self.seed, FS_DOMAIN) & 0xffff_f000)),
            Some(Segment::Gs) => ea.wrapping_add(0x7ffe_0000_0000 | (prf(self.seed, GS_DOMAIN) & 0xffff_f000)),
            _ => ea,
        }
    }

    /// Operand size in bytes for instructions whose first operand is the destination.
    fn op_size(ins: &Instruction) -> u8 {
        for op in &ins.operands {
            match op {
                Operand::Register(r) => return r.bytes(),
                Operand::Memory(m) if m.size.is_some() => return m.size.unwrap_or(8),
                _ => {}
            }
        }
        8
    }

    fn read(&mut self, op: &Operand, size: u8) -> Result<u64, HaltReason> {
        Ok(match op {
            Operand::Register(r) => self.state.read_reg(*r),
            Operand::Immediate(v) => (*v as u64) & mask(size * 8),
            Operand::Memory(m) => {
                let ea = self.effective_address(m);
                self.state.load(ea, m.size.unwrap_or(size))
            }
            Operand::LabelRef(sym) => self.symbol_address(sym) & mask(size * 8),
            Operand::StringLiteral(_) | Operand::Raw(_) => return Err(UNSUPPORTED),
        })
    }

    fn write(&mut self, op: &Operand, size: u8, value: u64) -> Result<(), HaltReason> {
        match op {
            Operand::Register(r) => self.state.write_reg(*r, value),
            Operand::Memory(m) => {
                let ea = self.effective_address(m);
                self.state.store(ea, m.size.unwrap_or(size), value);
            }
            _ => return Err(UNSUPPORTED),
        }
        Ok(())
    }

    fn set_result_flags(&mut self, result: u64, size: u8) {
        let bits = size * 8;
        let r = result & mask(bits);
        self.state.flags.zf = r == 0;
        self.state.flags.sf = (r >> (bits - 1)) & 1 == 1;
    }

    fn add_flags(&mut self, a: u64, b: u64, size: u8, subtract: bool) -> u64 {
        let bits = size * 8;
        let m = mask(bits);
        let (a, b) = (a & m, b & m);
        let sign = 1u64 << (bits - 1);
        let (r, cf) = if subtract {
            (a.wrapping_sub(b) & m, a < b)
        } else {
            let wide = a as u128 + b as u128;
            ((wide as u64) & m, wide > m as u128)
        };
        let of = if subtract {
            (a ^ b) & sign != 0 && (a ^ r) & sign != 0
        } else {
            (a ^ b) & sign == 0 && (a ^ r) & sign != 0
        };
        self.state.flags.cf = cf;
        self.state.flags.of = of;
        self.set_result_flags(r, size);
        r
    }

    fn condition(&self, cc: &str) -> bool {
        let f = self.state.flags;
        match cc {
            "e" => f.zf,
            "ne" => !f.zf,
            "l" => f.sf != f.of,
            "le" => f.zf || f.sf != f.of,
            "g" => !f.zf && f.sf == f.of,
            "ge" => f.sf == f.of,
            "b" => f.cf,
            "be" => f.cf || f.zf,
            "a" => !f.cf && !f.zf,
            "ae" => !f.cf,
            "s" => f.sf,
            _ => !f.sf,
        }
    }

    fn internal_target(&self, op: &Operand) -> Option<usize> {
        match op {
            Operand::LabelRef(sym) => self.f.label_index(sym),
            _ => None,
        }
    }

    /// Stub for a call that leaves the function: `rax` and the other
    /// caller-saved registers receive seeded values keyed by the call site.
    fn external_call(&mut self) {
        let site = (self.state.rip as u64) << 8;
        let base = CALL_DOMAIN.wrapping_add(site);
        self.state.set_reg64(Gpr::Rax, prf(self.seed, base));
        for r in CALL_CLOBBERED {
            let v = prf(self.seed, base.wrapping_add(r.index() as u64));
            self.state.set_reg64(r, v);
        }
    }

    fn step(&mut self, ins: &Instruction) -> Step {
        let ops = ins.operands.as_slice();
        let m = ins.mnemonic.as_str();
        if let Some(cc) = condition_code(m) {
            let target = self.internal_target(ops.first().ok_or(UNSUPPORTED)?).ok_or(UNSUPPORTED)?;
            return Ok(if self.condition(cc) { Flow::Jump(target) } else { Flow::Next });
        }
        match (m, ops) {
            ("nop", _) => {}
            ("mov", [dst, src]) => {
                let size = Self::op_size(ins);
                let v = self.read(src, size)?;
                self.write(dst, size, v)?;
            }
            ("movzx" | "movsx" | "movsxd", [Operand::Register(dst), src]) => {
                let src_size = match src {
                    Operand::Register(r) => r.bytes(),
                    Operand::Memory(mm) => mm.size.unwrap_or(if m == "movsxd" { 4 } else { 1 }),
                    _ => return Err(UNSUPPORTED),
                };
                let v = self.read(src, src_size)?;
                let out = if m == "movzx" {
                    v
                } else {
                    sign_extend(v, src_size * 8) as u64
                };
                self.state.write_reg(*dst, out & mask(dst.width));
            }
            ("lea", [Operand::Register(dst), src]) => {
                let ea = match src {
                    Operand::Memory(mm) => self.effective_address(mm),
                    Operand::LabelRef(sym) => self.symbol_address(sym),
                    _ => return Err(UNSUPPORTED),
                };
                self.state.write_reg(*dst, ea & mask(dst.width));
            }
            ("add" | "sub" | "cmp", [dst, src]) => {
                let size = Self::op_size(ins);
                let a = self.read(dst, size)?;
                let b = self.read(src, size)?;
                let r = self.add_flags(a, b, size, m != "add");
                if m != "cmp" {
                    self.write(dst, size, r)?;
                }
            }
            ("and" | "or" | "xor" | "test", [dst, src]) => {
                let size = Self::op_size(ins);
                let a = self.read(dst, size)?;
                let b = self.read(src, size)?;
                let r = match m {
                    "or" => a | b,
                    "xor" => a ^ b,
                    _ => a & b,
                };
                self.state.flags.cf = false;
                self.state.flags.of = false;
                self.set_result_flags(r, size);
                if m != "test" {
                    self.write(dst, size, r)?;
                }
            }
            ("inc" | "dec", [dst]) => {
                let size = Self::op_size(ins);
                let a = self.read(dst, size)?;
                let cf = self.state.flags.cf;
                let r = self.add_flags(a, 1, size, m == "dec");
                self.state.flags.cf = cf;
                self.write(dst, size, r)?;
            }
            ("neg", [dst]) => {
                let size = Self::op_size(ins);
                let a = self.read(dst, size)?;
                let r = self.add_flags(0, a, size, true);
                self.state.flags.cf = a & mask(size * 8) != 0;
                self.write(dst, size, r)?;
            }
            ("not", [dst]) => {
                let size = Self::op_size(ins);
                let a = self.read(dst, size)?;
                self.write(dst, size, !a)?;
            }
            ("shl" | "sal" | "shr" | "sar", [dst, rest @ ..]) => {
                let size = Self::op_size(ins);
                let count = match rest {
                    [] => 1,
                    [c] => self.read(c, 1)?,
                    _ => return Err(UNSUPPORTED),
                };
                self.shift(m, dst, size, count)?;
            }
            ("imul", [src]) | ("mul", [src]) => {
                let size = Self::op_size(ins);
                self.widening_multiply(m == "imul", src, size)?;
            }
            ("imul", [dst, src]) => {
                let size = Self::op_size(ins);
                let a = self.read(dst, size)?;
                let b = self.read(src, size)?;
                let r = self.signed_multiply(a, b, size);
                self.write(dst, size, r)?;
            }
            ("imul", [dst, src, imm]) => {
                let size = Self::op_size(ins);
                let a = self.read(src, size)?;
                let b = self.read(imm, size)?;
                let r = self.signed_multiply(a, b, size);
                self.write(dst, size, r)?;
            }
            ("div" | "idiv", [src]) => {
                let size = Self::op_size(ins);
                self.divide(m == "idiv", src, size)?;
            }
            ("cdq", []) => {
                let eax = self.state.reg64(Gpr::Rax) as u32;
                let edx = if eax >> 31 == 1 { 0xffff_ffff } else { 0 };
                self.state.set_reg64(Gpr::Rdx, edx);
            }
            ("cqo", []) => {
                let rax = self.state.reg64(Gpr::Rax);
                self.state.set_reg64(Gpr::Rdx, if (rax as i64) < 0 { u64::MAX } else { 0 });
            }
            ("cdqe", []) => {
                let eax = self.state.reg64(Gpr::Rax) & 0xffff_ffff;
                self.state.set_reg64(Gpr::Rax, sign_extend(eax, 32) as u64);
            }
            ("push", [src]) => {
                let v = match src {
                    Operand::Immediate(i) => *i as u64,
                    _ => self.read(src, 8)?,
                };
                self.state.push(v);
            }
            ("pop", [dst]) => {
                let v = self.state.pop();
                self.write(dst, 8, v)?;
            }
            ("leave", []) => {
                let rbp = self.state.reg64(Gpr::Rbp);
                self.state.set_reg64(Gpr::Rsp, rbp);
                let v = self.state.pop();
                self.state.set_reg64(Gpr::Rbp, v);
            }
            ("jmp", [target]) => {
                if let Some(t) = self.internal_target(target) {
                    return Ok(Flow::Jump(t));
                }
                if let Operand::LabelRef(_) = target {
                    // Tail call out of the function.
                    self.external_call();
                    return self.ret(0);
                }
                return Err(UNSUPPORTED);
            }
            ("call", [target]) => {
                if let Some(t) = self.internal_target(target) {
                    let ret_addr = self.code_address(self.state.rip + 1);
                    self.state.push(ret_addr);
                    self.depth += 1;
                    return Ok(Flow::Jump(t));
                }
                self.external_call();
            }
            ("ret" | "retn", []) => return self.ret(0),
            ("ret" | "retn", [Operand::Immediate(n)]) => return self.ret(*n as u64),
            _ => return Err(UNSUPPORTED),
        }
        Ok(Flow::Next)
    }

    fn ret(&mut self, extra_pop: u64) -> Step {
        if self.depth == 0 {
            return Ok(Flow::Finish);
        }
        self.depth -= 1;
        let addr = self.state.pop();
        let rsp = self.state.reg64(Gpr::Rsp).wrapping_add(extra_pop);
        self.state.set_reg64(Gpr::Rsp, rsp);
        let offset = addr.wrapping_sub(self.code_base);
        if !offset.is_multiple_of(SLOT_BYTES) {
            return Err(HaltReason::Fault);
        }
        let target = offset / SLOT_BYTES;
        if target >= self.f.instructions.len() as u64 {
            return Err(HaltReason::Fault);
        }
        Ok(Flow::Jump(target as usize))
    }

    fn shift(&mut self, m: &str, dst: &Operand, size: u8, count: u64) -> Result<(), HaltReason> {
        let bits = size as u32 * 8;
        let count = (count & if size == 8 { 0x3f } else { 0x1f }) as u32;
        let a = self.read(dst, size)? & mask(size * 8);
        if count == 0 {
            return Ok(());
        }
        let msb = |v: u64| (v >> (bits - 1)) & 1 == 1;
        let (r, cf) = match m {
            "shl" | "sal" => {
                let r = if count >= bits { 0 } else { a << count };
                let cf = count <= bits && (a >> (bits - count)) & 1 == 1;
                (r, cf)
            }
            "shr" => {
                let r = if count >= bits { 0 } else { a >> count };
                let cf = count <= bits && (a >> (count - 1)) & 1 == 1;
                (r, cf)
            }
            _ => {
                let s = sign_extend(a, size * 8);
                let r = (s >> count.min(bits - 1)) as u64;
                let cf = (s >> (count - 1).min(bits - 1)) & 1 == 1;
                (r, cf)
            }
        };
        let r = r & mask(size * 8);
        self.state.flags.cf = cf;
        if count == 1 {
            self.state.flags.of = match m {
                "shl" | "sal" => msb(r) != cf,
                "shr" => msb(a),
                _ => false,
            };
        }
        self.set_result_flags(r, size);
        self.write(dst, size, r)
    }

    fn signed_multiply(&mut self, a: u64, b: u64, size: u8) -> u64 {
        let bits = size * 8;
        let full = sign_extend(a, bits) as i128 * sign_extend(b, bits) as i128;
        let r = (full as u64) & mask(bits);
        let overflow = sign_extend(r, bits) as i128 != full;
        self.state.flags.cf = overflow;
        self.state.flags.of = overflow;
        self.set_result_flags(r, size);
        r
    }

    /// One-operand `mul`/`imul`: the accumulator times `src` into the
    /// high:low register pair (`ax` for bytes, `dx:ax`, `edx:eax`, `rdx:rax`).
    fn widening_multiply(&mut self, signed: bool, src: &Operand, size: u8) -> Result<(), HaltReason> {
        let bits = size * 8;
        let b = self.read(src, size)?;
        let a = self.state.reg64(Gpr::Rax) & mask(bits);
        let full: u128 = if signed {
            (sign_extend(a, bits) as i128 * sign_extend(b, bits) as i128) as u128
        } else {
            a as u128 * b as u128
        };
        let lo = (full as u64) & mask(bits);
        let hi = ((full >> bits) as u64) & mask(bits);
        let overflow = if signed {
            let ext = if sign_extend(lo, bits) < 0 { mask(bits) } else { 0 };
            hi != ext
        } else {
            hi != 0
        };
        if size == 1 {
            self.state.write_reg(Register::from_name("ax").expect("ax"), (hi << 8) | lo);
        } else {
            let acc = Register { family: Gpr::Rax, width: bits, high_byte: false };
            let ext = Register { family: Gpr::Rdx, width: bits, high_byte: false };
            self.state.write_reg(acc, lo);
            self.state.write_reg(ext, hi);
        }
        self.state.flags.cf = overflow;
        self.state.flags.of = overflow;
        self.set_result_flags(lo, size);
        Ok(())
    }

    /// `div`/`idiv`; division by zero and quotient overflow fault.
    fn divide(&mut self, signed: bool, src: &Operand, size: u8) -> Result<(), HaltReason> {
        let bits = size * 8;
        let divisor = self.read(src, size)? & mask(bits);
        if divisor == 0 {
            return Err(HaltReason::Fault);
        }
        let rax = self.state.reg64(Gpr::Rax);
        let rdx = self.state.reg64(Gpr::Rdx);
        let dividend: u128 = if size == 1 {
            (rax & 0xffff) as u128
        } else {
            (((rdx & mask(bits)) as u128) << bits) | (rax & mask(bits)) as u128
        };
        let (q, r) = if signed {
            let dividend_bits = 2 * bits as u32;
            let shift = 128 - dividend_bits;
            let n = ((dividend << shift) as i128) >> shift;
            let d = sign_extend(divisor, bits) as i128;
            let q = n / d;
            let lim = 1i128 << (bits - 1);
            if q >= lim || q < -lim {
                return Err(HaltReason::Fault);
            }
            (q as u64 & mask(bits), (n % d) as u64 & mask(bits))
        } else {
            let q = dividend / divisor as u128;
            if q > mask(bits) as u128 {
                return Err(HaltReason::Fault);
            }
            (q as u64, (dividend % divisor as u128) as u64)
        };
        if size == 1 {
            self.state.write_reg(Register::from_name("ax").expect("ax"), (r << 8) | q);
        } else {
            let acc = Register { family: Gpr::Rax, width: bits, high_byte: false };
            let ext = Register { family: Gpr::Rdx, width: bits, high_byte: false };
            self.state.write_reg(acc, q);
            self.state.write_reg(ext, r);
        }
        Ok(())
    }
}
