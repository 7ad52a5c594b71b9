//! Instances shipped with the binary.

use crate::run::Command;

pub struct Example {
    pub name: &'static str,
    pub text: &'static str,
    pub steps: &'static [Command],
}

pub const EXAMPLES: &[Example] = &[
    Example {
        name: "a3",
        text: include_str!("../instances/a3.toml"),
        steps: &[
            Command::VerifyPcs,
            Command::StratModules,
            Command::EssFromPcs,
            Command::VerifyEss,
            Command::PcsFromEss,
            Command::CharTilting,
        ],
    },
    Example {
        name: "kronecker",
        text: include_str!("../instances/kronecker.toml"),
        steps: &[
            Command::VerifyPpcs,
            Command::ExtensionLadder,
            Command::ConstructQ,
            Command::VerifyPcs,
            Command::PcsFromEss,
        ],
    },
    Example {
        name: "loop",
        text: include_str!("../instances/loop.toml"),
        steps: &[Command::VerifyPcs, Command::CharTilting, Command::EssFromPcs],
    },
];

pub fn example(name: &str) -> Option<&'static Example> {
    EXAMPLES.iter().find(|e| e.name == name)
}
