"""
Run report model for slicelab
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

FORMAT_VERSION = 1


class RunReport(BaseModel):
    """Self-describing output document of one cli command."""
    format_version: int = Field(default=FORMAT_VERSION, description="Report format version")
    command: List[str] = Field(..., description="Echo of the command line")
    field: Optional[str] = Field(None, description="Field flag")
    inputs_digest: str = Field(..., description="sha256 of the input files and arguments")
    seed: int = Field(..., description="Seed in effect")
    result: Dict[str, Any] = Field(..., description="Command payload")
    search_stats: Optional[Dict[str, Any]] = Field(None, description="Visits and timing")
    versions: Dict[str, str] = Field(default_factory=dict, description="slicelab and library versions")
