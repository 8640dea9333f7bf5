//! Built-in programs for `densig demo`.

/// Classically correlated channel: as an explicit product mixture and as
/// the named constant, then teleported.
pub const EQ4: &str = "\
# Classically correlated two-qubit channel.
dims 2 2
ket a1 = |0>
ket a2 = |1>
rho mixture = mix 0.5 kron(proj(a1), proj(a1)) 0.5 kron(proj(a2), proj(a2))
rho channel = classical_corr
analyze mixture
analyze channel
teleport channel with 0.6 0.8
";

/// Bell channel, teleported and compared against the correlated channel.
pub const EQ7: &str = "\
# Maximally entangled two-qubit channel.
dims 2 2
ket phi = (1+0i)|0,0> + (1+0i)|1,1>
rho channel = proj(phi)
analyze channel
teleport channel with 0.6 0.8
compare 0.6 0.8
";

/// Two-party reductions of the three-party state (|000⟩ + |111⟩)/√2.
pub const GHZ: &str = "\
# Reductions of a three-party pure state.
dims 2 2
rho ab = tripartite(0.5, 0.5).AB
rho ac = tripartite(0.5, 0.5).AC
analyze ab
analyze ac
";

pub fn lookup(name: &str) -> Option<&'static str> {
    match name {
        "eq4" => Some(EQ4),
        "eq7" => Some(EQ7),
        "ghz" => Some(GHZ),
        _ => None,
    }
}
