/// Two encodings of the same computation, plus a copy of the second with one
/// constant changed so that it is no longer equivalent.
#[derive(Debug, Clone, Copy)]
pub struct EquivalentPair {
    pub name: &'static str,
    pub original: &'static str,
    pub equivalent: &'static str,
    pub mutant: &'static str,
}

macro_rules! pair {
    ($name:expr, $a:expr, $b:expr, $m:expr $(,)?) => {
        EquivalentPair {
            name: $name,
            original: $a,
            equivalent: $b,
            mutant: $m,
        }
    };
}

const CATALOG: [EquivalentPair; 20] = [
    pair!(
        "lea-shift-vs-scaled-index",
        "mov eax, esi\nlea edi, [rax+1]\nshl rdi, 3\nmov rax, rdi\nret",
        "mov eax, esi\nlea rdi, ds:8[rax*8]\nmov rax, rdi\nret",
        "mov eax, esi\nlea rdi, ds:16[rax*8]\nmov rax, rdi\nret",
    ),
    pair!(
        "imul-vs-shift",
        "mov rax, rdi\nimul rax, rax, 8\nret",
        "mov rax, rdi\nshl rax, 3\nret",
        "mov rax, rdi\nshl rax, 4\nret",
    ),
    pair!(
        "xor-vs-mov-zero",
        "xor eax, eax\nret",
        "mov eax, 0\nret",
        "mov eax, 1\nret",
    ),
    pair!(
        "add-chain-vs-lea",
        "mov rax, rdi\nadd rax, rsi\nadd rax, 5\nret",
        "lea rax, [rsi+rdi+5]\nret",
        "lea rax, [rsi+rdi+6]\nret",
    ),
    pair!(
        "imul3-vs-lea",
        "imul rax, rdi, 3\nret",
        "lea rax, [rdi+rdi*2]\nret",
        "lea rax, [rdi+rdi*4]\nret",
    ),
    pair!(
        "neg-vs-subtract-from-zero",
        "mov rax, rdi\nneg rax\nret",
        "mov rax, 0\nsub rax, rdi\nret",
        "mov rax, 1\nsub rax, rdi\nret",
    ),
    pair!(
        "spill-add-vs-inc",
        "mov qword ptr [rsp-8], rdi\nmov rax, qword ptr [rsp-8]\nadd rax, 1\nret",
        "mov qword ptr [rsp-8], rdi\nmov rax, qword ptr [rsp-8]\ninc rax\nret",
        "mov qword ptr [rsp-8], rdi\nmov rax, qword ptr [rsp-16]\ninc rax\nret",
    ),
    pair!(
        "push-pop-vs-explicit-stack",
        "push rdi\npop rax\nret",
        "sub rsp, 8\nmov qword ptr [rsp], rdi\nmov rax, qword ptr [rsp]\nadd rsp, 8\nret",
        "sub rsp, 8\nmov qword ptr [rsp], rdi\nmov rax, qword ptr [rsp]\nadd rsp, 16\nret",
    ),
    pair!(
        "shr-vs-div",
        "mov rax, rdi\nshr rax, 2\nret",
        "mov rax, rdi\nxor edx, edx\nmov ecx, 4\ndiv rcx\nret",
        "mov rax, rdi\nxor edx, edx\nmov ecx, 8\ndiv rcx\nret",
    ),
    pair!(
        "max-branch-orientation",
        "cmp rdi, rsi\njle .L1\nmov rax, rdi\njmp .L2\n.L1:\nmov rax, rsi\n.L2:\nadd rax, 1\nret",
        "mov rax, rsi\ncmp rsi, rdi\njge .L3\nmov rax, rdi\n.L3:\nadd rax, 1\nret",
        "mov rax, rsi\ncmp rsi, rdi\njge .L3\nmov rax, rdi\n.L3:\nadd rax, 2\nret",
    ),
    pair!(
        "loop-vs-closed-form",
        "xor eax, eax\nmov ecx, 10\n.Lloop:\nadd rax, rcx\ndec rcx\njne .Lloop\nret",
        "mov eax, 55\nret",
        "mov eax, 56\nret",
    ),
    pair!(
        "scratch-register-renaming",
        "mov rcx, rdi\nadd rcx, 7\nmov rax, rcx\nret",
        "mov rdx, rdi\nadd rdx, 7\nmov rax, rdx\nret",
        "mov rdx, rdi\nadd rdx, 8\nmov rax, rdx\nret",
    ),
    pair!(
        "test-vs-cmp-zero",
        "test rdi, rdi\nje .Lz\nmov eax, 1\nret\n.Lz:\nmov eax, 2\nret",
        "cmp rdi, 0\nje .Lz\nmov eax, 1\nret\n.Lz:\nmov eax, 2\nret",
        "cmp rdi, 0\nje .Lz\nmov eax, 3\nret\n.Lz:\nmov eax, 2\nret",
    ),
    pair!(
        "movsxd-vs-cdqe",
        "movsxd rax, edi\nadd rax, 3\nret",
        "mov eax, edi\ncdqe\nadd rax, 3\nret",
        "mov eax, edi\ncdqe\nadd rax, 4\nret",
    ),
    pair!(
        "movzx-vs-mask",
        "movzx eax, dil\ninc eax\nret",
        "mov eax, edi\nand eax, 255\nadd eax, 1\nret",
        "mov eax, edi\nand eax, 255\nadd eax, 2\nret",
    ),
    pair!(
        "memory-increment",
        "mov rax, qword ptr [rdi+8]\nadd rax, 1\nmov qword ptr [rdi+8], rax\nret",
        "mov rax, qword ptr [rdi+8]\ninc rax\nmov qword ptr [rdi+8], rax\nret",
        "mov rax, qword ptr [rdi+16]\ninc rax\nmov qword ptr [rdi+8], rax\nret",
    ),
    pair!(
        "pop-rbp-vs-leave",
        "push rbp\nmov rbp, rsp\nmov dword ptr [rbp-4], edi\nmov eax, dword ptr [rbp-4]\nadd eax, 10\npop rbp\nret",
        "push rbp\nmov rbp, rsp\nmov dword ptr [rbp-4], edi\nmov eax, dword ptr [rbp-4]\nadd eax, 10\nleave\nret",
        "push rbp\nmov rbp, rsp\nmov dword ptr [rbp-4], edi\nmov eax, dword ptr [rbp-4]\nadd eax, 11\nleave\nret",
    ),
    pair!(
        "imul10-vs-lea-add",
        "imul eax, edi, 10\nret",
        "lea eax, [rdi+rdi*4]\nadd eax, eax\nret",
        "lea eax, [rdi+rdi*2]\nadd eax, eax\nret",
    ),
    pair!(
        "abs-branch-vs-branchless",
        "mov rax, rdi\ntest rax, rax\njns .Lp\nneg rax\n.Lp:\nadd rax, 1\nret",
        "mov rax, rdi\ncqo\nxor rax, rdx\nsub rax, rdx\nadd rax, 1\nret",
        "mov rax, rdi\ncqo\nxor rax, rdx\nsub rax, rdx\nadd rax, 2\nret",
    ),
    pair!(
        "internal-call-helper",
        "mov rdi, rsi\ncall .Lhelper\ninc rax\nret\n.Lhelper:\nlea rax, [rdi+rdi]\nret",
        "mov rdi, rsi\ncall .Lh\nadd rax, 1\nret\n.Lh:\nmov rax, rdi\nshl rax, 1\nret",
        "mov rdi, rsi\ncall .Lh\nadd rax, 3\nret\n.Lh:\nmov rax, rdi\nshl rax, 1\nret",
    ),
];

/// Hand-built semantically equivalent instruction sequences with mutants.
pub fn equivalence_catalog() -> &'static [EquivalentPair] {
    &CATALOG
}
