# Loop Lab - numerical checks for Yang-Mills in Mandelstam-Gross loop variables
