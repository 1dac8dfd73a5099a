//! What each subcommand demonstrates.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Claim {
    pub command: &'static str,
    pub statement: &'static str,
}

pub const CLAIMS: &[Claim] = &[
    Claim {
        command: "space gen",
        statement: "Grid and random samples of spheres, snowflakes, products and tori are finite metric measure spaces.",
    },
    Claim {
        command: "mds embed",
        statement: "The positive part of the MDS map never shrinks distances and minimizes strain among m-dimensional configurations.",
    },
    Claim {
        command: "mds krein",
        statement: "The positive and negative parts together reproduce every squared distance in the indefinite norm.",
    },
    Claim {
        command: "sphere eigen",
        statement: "Degree-j spherical harmonics are eigenfunctions of the sphere kernel, positive for odd j and negative for even j >= 2.",
    },
    Claim {
        command: "sphere asymptotics",
        statement: "The positive sphere eigenvalues decay like n^-(d+1), with series summands peaking near (2n-1)^2 / (2(d+3)).",
    },
    Claim {
        command: "stability converge",
        statement: "Grid embeddings of the circle converge to the limit map up to an orthogonal transformation, with kernel gaps bounded by transport costs.",
    },
    Claim {
        command: "product check",
        statement: "The MDS spectrum of a product is the union of the factor spectra and squared embedded distances add.",
    },
    Claim {
        command: "torus check",
        statement: "MDS of the flat torus realizes pi times the sum of the circle distances, which is bi-Holder to the flat metric.",
    },
];

pub fn claim_for(command: &str) -> Option<&'static Claim> {
    CLAIMS.iter().find(|c| c.command == command)
}
