//! Scenarios compiled into the binary.

pub struct Bundled {
    pub name: &'static str,
    pub text: &'static str,
}

macro_rules! bundled {
    ($($name:literal),* $(,)?) => {
        &[$(Bundled { name: $name, text: include_str!(concat!("../../../scenarios/", $name, ".toml")) }),*]
    };
}

pub const BUNDLED: &[Bundled] = bundled![
    "pullback_identity",
    "pullback_axis",
    "pullback_diagonal",
    "dirac_jumping",
    "so3_blowdown",
    "psi_two_form_axis",
    "psi_poisson_diagonal",
    "psi_identity",
    "blowup_plane_origin",
    "blowup_line_kernel",
    "blowup_line_restriction",
    "dirac_graphs",
    "foliation_basics",
    "so3_algebroid",
];

pub fn lookup(name: &str) -> Option<&'static Bundled> {
    let name = name.strip_suffix(".toml").unwrap_or(name);
    BUNDLED.iter().find(|b| b.name == name)
}
