import numpy as np
from scipy.integrate import solve_ivp
T=25*np.pi; s=T/8
wi=lambda t: np.exp(-(t-(T/2+s))**2/(2*s*s)); wf=lambda t: np.exp(-(t-(T/2-s))**2/(2*s*s))
def W(t):
    A=np.array([[0,-wi(t),0],[-wi(t),0,-wf(t)],[0,-wf(t),0]]); I=np.eye(3)
    return np.kron(A,I)+np.kron(I,A)
psi0=np.zeros(9,complex); psi0[0]=1
sol=solve_ivp(lambda t,y:-1j*W(t)@y,[0,1.1*T],psi0,rtol=1e-11,atol=1e-12,dense_output=True)
worst=0
for tt in np.linspace(0,1.1*T,201):
    e,v=np.linalg.eigh(W(tt)); Z=v[:,np.abs(e)<1e-9]
    y=sol.sol(tt); l=1-np.linalg.norm(Z.T@y)**2; worst=max(worst,l)
    if abs(tt/np.pi-12.65)<0.1: print(tt/np.pi,l)
print("max",worst,"final",abs(sol.y[8,-1])**2)
