"""Configuration settings for the qKZB heat-equation toolkit."""

from pathlib import Path
from typing import Literal
from pydantic_settings import BaseSettings
from pydantic import ConfigDict
from dotenv import load_dotenv

# Load environment variables
load_dotenv('.env')

class Settings(BaseSettings):
    """Numerical and harness settings."""
    
    # Directory Configuration
    base_dir: Path = Path(__file__).parent
    data_dir: Path = base_dir / "data"
    cache_dir: Path = data_dir / "cache"
    reports_dir: Path = data_dir / "reports"
    
    # Truncation
    target_abs_err: float = 1e-12
    product_terms: int = 60
    pole_threshold: float = 1e-13
    
    # Quadrature
    quad_nodes: int = 64          # Gauss-Legendre nodes per contour segment
    detour_nodes: int = 32
    residue_nodes: int = 32
    residue_radius: float = 1e-3
    torus_points: int = 96
    path_nodes: int = 48          # nodes per panel on the mu-path
    path_exponent: float = 45.0   # T_max solves pi*|eta|*T^2 = path_exponent
    max_refinements: int = 3
    
    # Conventions
    contour_orientation: Literal["continued", "mirrored"] = "continued"
    heat_p_convention: Literal["minus_2_eta_kappa", "tau_minus_2_eta_kappa"] = "minus_2_eta_kappa"
    
    # Rational grid F_N(eps)
    grid_epsilon_re: float = 0.2357
    grid_epsilon_im: float = 0.0113
    
    # Harness
    default_seed: int = 7
    tolerance_scale: float = 1.0
    qkzb_threads: int = 1
    
    # Cache Settings
    cache_ttl: int = 7 * 24 * 3600
    enable_cache: bool = True
    
    # Logging
    log_level: str = "INFO"
    
    @property
    def grid_epsilon(self) -> complex:
        """Default generic offset of the rational grid."""
        return complex(self.grid_epsilon_re, self.grid_epsilon_im)
    
    def create_directories(self):
        """Create necessary directories if they don't exist."""
        for dir_path in [self.data_dir, self.cache_dir, self.reports_dir]:
            dir_path.mkdir(parents=True, exist_ok=True)
    
    model_config = ConfigDict(
        env_file=".env",
        case_sensitive=False,
        extra="ignore"
    )

# Create global settings instance
settings = Settings()
settings.create_directories()
